"""Periodic tables of fermionic Gaussian states and operations.

The data are the K-groups of translation-invariant fermionic Gaussian states
(fGSs) and operations (fGOs) in the ten Altland-Zirnbauer classes for
``d = 0..7`` (Bott periodic in ``d``), together with the homomorphism
``V -> V Gamma_0 V^dag`` from operations to states:

* its image (disentanglable states / state-like operations),
* the quotient of the state group by the image (non-disentanglable states),
* its kernel (genuinely dynamical operations).

Entries of the refined tables carry an order label: ``intrinsic`` (survives
without any symmetry), ``SET`` (symmetry-enriched), ``SPT``
(symmetry-protected) or ``SET-subgroup`` (only odd multiples of the
generator are symmetry-enriched, even ones are symmetry-protected).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .symmetry import AZClass, EMERGENT, SymmetrySpec

FACTORS = ("Z", "2Z", "Z2")


@dataclass(frozen=True)
class KGroup:
    """Finitely generated abelian group written as a product of ``Z``, ``2Z`` and ``Z2`` factors.

    ``2Z`` is kept apart from ``Z`` to record the embedding index of
    subgroups such as the even windings.
    """

    factors: tuple[str, ...] = ()

    def __post_init__(self):
        bad = [f for f in self.factors if f not in FACTORS]
        if bad:
            raise ConfigError(f"unknown K-group factors {bad}")

    @classmethod
    def parse(cls, text: str) -> "KGroup":
        t = text.replace(" ", "").replace("x", "×").replace("*", "×")
        if t in ("0", ""):
            return cls(())
        if t.endswith("^2"):
            base = t[:-2]
            return cls((base, base))
        return cls(tuple(t.split("×")))

    def __str__(self) -> str:
        return "×".join(self.factors) if self.factors else "0"

    def __repr__(self) -> str:
        return f"KGroup({str(self)!r})"

    @property
    def trivial(self) -> bool:
        return not self.factors

    @property
    def rank(self) -> int:
        return sum(f in ("Z", "2Z") for f in self.factors)

    @property
    def torsion(self) -> int:
        """Order of the torsion part."""
        return 2 ** sum(f == "Z2" for f in self.factors)

    @property
    def order(self) -> int | None:
        return None if self.rank else self.torsion

    def squared(self) -> "KGroup":
        return KGroup(self.factors * 2)

    def embeds_in(self, other: "KGroup") -> bool:
        """Necessary condition for an injective homomorphism into ``other``."""
        if self.rank > other.rank:
            return False
        return self.torsion <= other.torsion

    def to_json(self) -> str:
        return str(self)


ZERO = KGroup(())

# ---------------------------------------------------------------------------
# Bott periodicity: pi_0 of the classifying spaces; pi_d(X_q) = pi_0(X_{q-d})

_PI0_COMPLEX = {0: "Z", 1: "0"}
_PI0_REAL = {0: "Z", 1: "Z2", 2: "Z2", 3: "0", 4: "2Z", 5: "0", 6: "0", 7: "0"}
SPACES = ("C0", "C1", "R0", "R1", "R2", "R3", "R4", "R5", "R6", "R7")


def _split_space(space: str) -> tuple[str, int, int]:
    """``"R1^2"`` -> ``("R", 1, 2)``."""
    power = 1
    if "^" in space:
        space, p = space.split("^")
        power = int(p)
    kind, q = space[0], int(space[1:])
    if kind not in "CR" or (kind == "C" and q not in (0, 1)) or (kind == "R" and not 0 <= q <= 7):
        raise ConfigError(f"unknown classifying space {space!r}")
    return kind, q, power


def bott_table(space: str, d: int) -> KGroup:
    """``pi_d`` of ``C_q``, ``R_q`` or a power like ``"R1^2"``."""
    if d < 0:
        raise ConfigError("dimension must be non-negative")
    kind, q, power = _split_space(space)
    if kind == "C":
        g = KGroup.parse(_PI0_COMPLEX[(q - d) % 2])
    else:
        g = KGroup.parse(_PI0_REAL[(q - d) % 8])
    return KGroup(g.factors * power)


# classifying spaces (states, operations) per class
CLASSIFYING_SPACES = {
    AZClass.A: ("C0", "C1"), AZClass.AIII: ("C1", "C1^2"),
    AZClass.AI: ("R0", "R1"), AZClass.BDI: ("R1", "R1^2"),
    AZClass.D: ("R2", "R1"), AZClass.DIII: ("R3", "C1"),
    AZClass.AII: ("R4", "R5"), AZClass.CII: ("R5", "R5^2"),
    AZClass.C: ("R6", "R5"), AZClass.CI: ("R7", "C1"),
}

# bosonic operations reduce to class A / AI / AII operations
BOSON_OP_CLASS = {"none": AZClass.A, "plus": AZClass.AI, "minus": AZClass.AII}

# ---------------------------------------------------------------------------
# Full table: "state / op" per d = 0..7.  Shading markers: "!" full, "?" partial
# (state side: non-disentanglable; op side: genuinely dynamical).

_FULL = {
    AZClass.A:    ["Z! / 0", "0 / Z!", "Z! / 0", "0 / Z!", "Z! / 0", "0 / Z!", "Z! / 0", "0 / Z!"],
    AZClass.AIII: ["0 / 0", "Z / Z^2?", "0 / 0", "Z / Z^2?", "0 / 0", "Z / Z^2?", "0 / 0", "Z / Z^2?"],
    AZClass.AI:   ["Z! / Z2!", "0 / Z!", "0 / 0", "0 / 0", "2Z! / 0", "0 / 2Z!", "Z2! / 0", "Z2! / Z2!"],
    AZClass.BDI:  ["Z2 / Z2^2?", "Z / Z^2?", "0 / 0", "0 / 0", "0 / 0", "2Z / 2Z^2?", "0 / 0", "Z2 / Z2^2?"],
    AZClass.D:    ["Z2 / Z2", "Z2 / Z?", "Z! / 0", "0 / 0", "0 / 0", "0 / 2Z!", "2Z! / 0", "0 / Z2!"],
    AZClass.DIII: ["0 / 0", "Z2 / Z?", "Z2! / 0", "Z? / Z", "0 / 0", "0 / Z!", "0 / 0", "2Z / Z"],
    AZClass.AII:  ["2Z! / 0", "0 / 2Z!", "Z2! / 0", "Z2! / Z2!", "Z! / Z2!", "0 / Z!", "0 / 0", "0 / 0"],
    AZClass.CII:  ["0 / 0", "2Z / 2Z^2?", "0 / 0", "Z2 / Z2^2?", "Z2 / Z2^2?", "Z / Z^2?", "0 / 0", "0 / 0"],
    AZClass.C:    ["0 / 0", "0 / 2Z!", "2Z! / 0", "0 / Z2!", "Z2 / Z2", "Z2 / Z?", "Z! / 0", "0 / 0"],
    AZClass.CI:   ["0 / 0", "0 / Z!", "0 / 0", "2Z / Z", "0 / 0", "Z2 / Z?", "Z2! / 0", "Z? / Z"],
}

# Refined tables.  Label suffixes: "@" intrinsic, "#" SET, "~" SET-subgroup;
# unmarked nonzero entries are SPT.
_DISENTANGLABLE = {
    AZClass.A:    ["0"] * 8,
    AZClass.AIII: ["0", "Z", "0", "Z", "0", "Z", "0", "Z"],
    AZClass.AI:   ["0"] * 8,
    AZClass.BDI:  ["Z2#", "Z~", "0", "0", "0", "2Z", "0", "Z2"],
    AZClass.D:    ["Z2@", "Z2@", "0", "0", "0", "0", "0", "0"],
    AZClass.DIII: ["0", "Z2", "0", "2Z", "0", "0", "0", "2Z"],
    AZClass.AII:  ["0"] * 8,
    AZClass.CII:  ["0", "2Z", "0", "Z2", "Z2", "Z", "0", "0"],
    AZClass.C:    ["0", "0", "0", "0", "Z2", "Z2", "0", "0"],
    AZClass.CI:   ["0", "0", "0", "2Z", "0", "Z2", "0", "2Z"],
}

_NON_DISENTANGLABLE = {
    AZClass.A:    ["Z", "0", "Z#", "0", "Z", "0", "Z#", "0"],
    AZClass.AIII: ["0"] * 8,
    AZClass.AI:   ["Z", "0", "0", "0", "2Z", "0", "Z2", "Z2"],
    AZClass.BDI:  ["0"] * 8,
    AZClass.D:    ["0", "0", "Z@", "0", "0", "0", "2Z@", "0"],
    AZClass.DIII: ["0", "0", "Z2", "Z2", "0", "0", "0", "0"],
    AZClass.AII:  ["2Z", "0", "Z2", "Z2", "Z", "0", "0", "0"],
    AZClass.CII:  ["0"] * 8,
    AZClass.C:    ["0", "0", "2Z#", "0", "0", "0", "Z#", "0"],
    AZClass.CI:   ["0", "0", "0", "0", "0", "0", "Z2", "Z2"],
}

_GENUINELY_DYNAMICAL = {
    AZClass.A:    ["0", "Z#", "0", "Z", "0", "Z#", "0", "Z~"],
    AZClass.AIII: ["0", "Z#", "0", "Z", "0", "Z#", "0", "Z"],
    AZClass.AI:   ["Z2", "Z#", "0", "0", "0", "2Z#", "0", "Z2"],
    AZClass.BDI:  ["Z2", "Z#", "0", "0", "0", "2Z#", "0", "Z2"],
    AZClass.D:    ["0", "2Z@", "0", "0", "0", "2Z@", "0", "Z2@"],
    AZClass.DIII: ["0", "2Z#", "0", "0", "0", "Z#", "0", "0"],
    AZClass.AII:  ["0", "2Z#", "0", "Z2", "Z2", "Z#", "0", "0"],
    AZClass.CII:  ["0", "2Z#", "0", "Z2", "Z2", "Z#", "0", "0"],
    AZClass.C:    ["0", "2Z#", "0", "Z2", "0", "2Z#", "0", "0"],
    AZClass.CI:   ["0", "Z#", "0", "0", "0", "2Z#", "0", "0"],
}

_LABELS = {"@": "intrinsic", "#": "SET", "~": "SET-subgroup"}

# Named examples of each kind of Gaussian topological order
EXAMPLES = {
    ("disentanglable", "intrinsic"): {"class": "D", "d": 1, "model": "kitaev", "note": "Kitaev chain, odd copies"},
    ("disentanglable", "SET"): {"class": "BDI", "d": 1, "model": "kitaev", "note": "Kitaev chain, odd copies"},
    ("disentanglable", "SPT"): {"class": "BDI", "d": 1, "model": "kitaev", "note": "Kitaev chain, even copies"},
    ("non-disentanglable", "intrinsic"): {"class": "D", "d": 2, "model": "pip", "note": "chiral superconductor"},
    ("non-disentanglable", "SET"): {"class": "A", "d": 2, "model": "chern", "note": "quantum Hall insulator"},
    ("non-disentanglable", "SPT"): {"class": "AII", "d": 2, "model": "qsh", "note": "time-reversal topological insulator"},
    ("genuinely-dynamical", "intrinsic"): {"class": "D", "d": 1, "model": "translation", "note": "lattice translation"},
    ("genuinely-dynamical", "SET"): {"class": "AI", "d": 1, "model": "translation", "note": "lattice translation"},
    ("genuinely-dynamical", "SPT"): {"class": "AII", "d": 3, "model": None, "note": "time-reversal Z2 operation"},
}


def _entry(text: str) -> tuple[KGroup, str | None]:
    label = None
    if text and text[-1] in _LABELS:
        label = _LABELS[text[-1]]
        text = text[:-1]
    g = KGroup.parse(text)
    if label is None and not g.trivial:
        label = "SPT"
    return g, label


def _shaded(text: str) -> tuple[KGroup, str | None]:
    shade = {"!": "full", "?": "partial"}.get(text[-1])
    return KGroup.parse(text.rstrip("!?")), shade


@dataclass(frozen=True)
class TableEntry:
    state: KGroup
    op: KGroup
    state_shade: str | None  # non-disentanglable: "full" / "partial" / None
    op_shade: str | None  # genuinely dynamical: "full" / "partial" / None


def _full_entry(az: AZClass, d: int) -> TableEntry:
    s, o = _FULL[az][d % 8].split("/")
    (sg, ss), (og, os_) = _shaded(s.strip()), _shaded(o.strip())
    return TableEntry(sg, og, ss, os_)


def _as_class(az) -> AZClass:
    try:
        return AZClass(az)
    except ValueError:
        raise ConfigError(f"unknown AZ class {az!r}") from None


def _check_d(d: int) -> int:
    if int(d) != d or d < 0:
        raise ConfigError(f"dimension must be a non-negative integer, got {d!r}")
    return int(d) % 8


def classify_states(az: AZClass | str, d: int) -> KGroup:
    return _full_entry(_as_class(az), _check_d(d)).state


def classify_ops(az: AZClass | str, d: int) -> KGroup:
    return _full_entry(_as_class(az), _check_d(d)).op


def classify_boson_ops(trs: str, d: int) -> KGroup:
    """Bosonic operations: unitary parts commuting with the symplectic form."""
    if trs not in BOSON_OP_CLASS:
        raise ConfigError(f"trs must be one of {sorted(BOSON_OP_CLASS)}")
    return classify_ops(BOSON_OP_CLASS[trs], d)


def classify_boson_states(symmetry=None, d: int = 0) -> KGroup:
    """Every pure short-range bosonic Gaussian state is trivial."""
    _check_d(d)
    return ZERO


@dataclass(frozen=True)
class HomomorphismInfo:
    az: AZClass
    d: int
    state_group: KGroup
    op_group: KGroup
    image: KGroup
    quotient_nondisentanglable: KGroup
    kernel_genuinely_dynamical: KGroup
    order_labels: dict = field(default_factory=dict)
    state_shade: str | None = None
    op_shade: str | None = None

    @property
    def disentanglable(self) -> bool:
        """Every state class is in the image."""
        return self.quotient_nondisentanglable.trivial

    def consistency(self) -> dict[str, bool]:
        """Group-theoretic relations between the five groups."""
        s, o, im, q, ker = (self.state_group, self.op_group, self.image,
                            self.quotient_nondisentanglable, self.kernel_genuinely_dynamical)
        out = {
            "image_in_state": im.embeds_in(s),
            "kernel_in_op": ker.embeds_in(o),
            "state_rank": s.rank == im.rank + q.rank,
            "op_rank": o.rank == ker.rank + im.rank,
        }
        if s.order is not None:
            out["state_order"] = s.order == im.torsion * q.torsion
        if o.order is not None:
            out["op_order"] = o.order == ker.torsion * im.torsion
        return out

    def to_dict(self) -> dict:
        return {
            "class": str(self.az), "d": self.d,
            "state_group": str(self.state_group), "op_group": str(self.op_group),
            "image": str(self.image),
            "quotient_nondisentanglable": str(self.quotient_nondisentanglable),
            "kernel_genuinely_dynamical": str(self.kernel_genuinely_dynamical),
            "order_labels": dict(self.order_labels),
            "state_shade": self.state_shade, "op_shade": self.op_shade,
        }


def homomorphism_info(az: AZClass | str, d: int) -> HomomorphismInfo:
    az = _as_class(az)
    dd = _check_d(d)
    full = _full_entry(az, dd)
    im, im_lab = _entry(_DISENTANGLABLE[az][dd])
    q, q_lab = _entry(_NON_DISENTANGLABLE[az][dd])
    ker, ker_lab = _entry(_GENUINELY_DYNAMICAL[az][dd])
    labels = {k: v for k, v in (("disentanglable", im_lab), ("non_disentanglable", q_lab),
                                ("genuinely_dynamical", ker_lab)) if v is not None}
    return HomomorphismInfo(az, int(d), full.state, full.op, im, q, ker, labels,
                            full.state_shade, full.op_shade)


def table_one() -> list[dict]:
    """Symmetry dictionary: physical symmetries, emergent symmetries, classifying spaces."""
    rows = []
    for az in AZClass:
        spec = SymmetrySpec.for_class(az)
        trs, phs, sls = EMERGENT[az]
        st, op = CLASSIFYING_SPACES[az]
        rows.append({"class": str(az), **spec.to_dict(),
                     "emergent": {"trs": trs, "phs": phs, "sls": sls},
                     "state_space": st, "op_space": op,
                     "boson_op": az in BOSON_OP_CLASS.values()})
    return rows


def dump_tables() -> dict:
    """Machine-readable transcription of every embedded table."""
    full, s3, s4, s5 = {}, {}, {}, {}
    for az in AZClass:
        full[str(az)] = []
        s3[str(az)], s4[str(az)], s5[str(az)] = [], [], []
        for d in range(8):
            info = homomorphism_info(az, d)
            full[str(az)].append({"state": str(info.state_group), "op": str(info.op_group),
                                  "state_shade": info.state_shade, "op_shade": info.op_shade})
            s3[str(az)].append([str(info.image), info.order_labels.get("disentanglable")])
            s4[str(az)].append([str(info.quotient_nondisentanglable), info.order_labels.get("non_disentanglable")])
            s5[str(az)].append([str(info.kernel_genuinely_dynamical), info.order_labels.get("genuinely_dynamical")])
    return {
        "classes": [str(az) for az in AZClass],
        "table1": table_one(),
        "full": full,
        "disentanglable": s3,
        "non_disentanglable": s4,
        "genuinely_dynamical": s5,
    }


def tables_checksum(doc: dict | None = None) -> str:
    doc = dump_tables() if doc is None else doc
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()
