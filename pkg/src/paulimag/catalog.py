"""Spin-orbital Pauli constraint systems for atomic shells.

The d7/d8 high-spin tables and the low-spin d7 system live in ``data/`` as
plain-text resources (``a1..a5 | b1..bk | sense | c``) guarded by SHA-256
checksums.  Everything here is exact rational arithmetic.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from typing import Iterable, Sequence

from .errors import DimensionMismatch, InfeasibleSymmetry, UnsupportedShell
from .polytope import EQ, LE, Polytope, Row, frac, is_feasible, remove_redundant

CHECKSUMS = {
    "d7_high.txt": "b862100ee77145b7f8c72a1085252ebf2df59d9992552dce57c7c7c6d6ccb07e",
    "d8_high.txt": "f3b0f9bd62e4432a23e2633f82ad9d440582a7e4cb479a931fe6d12b2aa9291d",
    "d7_low.txt": "78e422fb851995ebba92fa4d1eb0bd46dbe51be84ae16894d46ecc0fb81509be",
}

HIGH_SPIN_DEGENERATE = (1, 4, 5, 6, 9)
_META_KEYS = {"shell", "total_spin", "ordered", "orbital_cap"}


@dataclass(frozen=True)
class ShellConfig:
    electron_count: int
    orbital_dim: int = 5
    spin_sector: str = "high"
    total_spin: Fraction | None = None

    def __post_init__(self):
        if self.spin_sector not in ("high", "low", "spinless"):
            raise UnsupportedShell(f"unknown spin sector {self.spin_sector!r}")
        if not 1 <= self.electron_count <= 2 * self.orbital_dim:
            raise UnsupportedShell(f"{self.electron_count} electrons do not fit {self.orbital_dim} orbitals")
        if self.total_spin is None:
            if self.spin_sector == "high":
                s = Fraction(min(self.electron_count, 2 * self.orbital_dim - self.electron_count), 2)
            elif self.spin_sector == "low":
                s = Fraction(self.electron_count % 2, 2)
            else:
                s = Fraction(0)
            object.__setattr__(self, "total_spin", s)
        else:
            object.__setattr__(self, "total_spin", frac(self.total_spin))

    @property
    def multiplicity(self) -> int:
        """Number of spin occupation numbers (0 for spinless systems)."""
        if self.spin_sector == "spinless":
            return 0
        return int(2 * self.total_spin + 1)

    @property
    def key(self) -> str:
        if self.orbital_dim == 5:
            return f"d{self.electron_count}-{self.spin_sector}"
        return f"n{self.orbital_dim}-N{self.electron_count}-{self.spin_sector}"

    @classmethod
    def parse(cls, text: str) -> "ShellConfig":
        """``d7-high``, ``d7-low``, ``d3`` (high implied) or ``n7-N3-spinless``."""
        text = text.strip().lower()
        try:
            if text.startswith("n"):
                dim, count, sector = text.split("-")
                return cls(int(count[1:]), int(dim[1:]), sector)
            head, _, sector = text.partition("-")
            return cls(int(head.lstrip("d")), 5, sector or "high")
        except ValueError as exc:
            raise UnsupportedShell(f"cannot parse shell {text!r}") from exc

    @classmethod
    def d(cls, n: int, sector: str = "high") -> "ShellConfig":
        return cls(n, 5, sector)


@dataclass(frozen=True)
class Inequality:
    """``orbital . nu + spin . mu (<=|=) bound``."""

    orbital: tuple[Fraction, ...]
    spin: tuple[Fraction, ...]
    bound: Fraction
    sense: str = LE
    cubicle: str = ""

    def __post_init__(self):
        object.__setattr__(self, "orbital", tuple(frac(v) for v in self.orbital))
        object.__setattr__(self, "spin", tuple(frac(v) for v in self.spin))
        object.__setattr__(self, "bound", frac(self.bound))

    def lhs(self, nu: Sequence[Fraction], mu: Sequence[Fraction]) -> Fraction:
        return (sum((a * x for a, x in zip(self.orbital, nu)), Fraction(0))
                + sum((b * y for b, y in zip(self.spin, mu)), Fraction(0)))

    def holds(self, nu, mu) -> bool:
        v = self.lhs(nu, mu)
        return v == self.bound if self.sense == EQ else v <= self.bound

    def flat(self) -> Row:
        return Row(self.orbital + self.spin, self.bound, self.sense, self.cubicle)

    def normalized(self) -> "Inequality":
        r = self.flat().normalized()
        n = len(self.orbital)
        return replace(self, orbital=r.coeffs[:n], spin=r.coeffs[n:], bound=r.bound)

    def signature(self) -> tuple:
        """Cubicle signature: coefficients up to order within each block."""
        return tuple(sorted(self.orbital)), tuple(sorted(self.spin)), self.bound, self.sense

    def text(self) -> str:
        def fmt(v: Fraction) -> str:
            return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

        return (" ".join(fmt(v) for v in self.orbital) + " | " + " ".join(fmt(v) for v in self.spin)
                + f" | {self.sense} | {fmt(self.bound)}")

    @classmethod
    def parse(cls, line: str, cubicle: str = "") -> "Inequality":
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 4:
            raise ValueError(f"malformed constraint row: {line!r}")
        a, b, sense, c = parts
        sense = {"<=": LE, "≤": LE, "=": EQ, "==": EQ}[sense]
        return cls(tuple(Fraction(x) for x in a.split()), tuple(Fraction(x) for x in b.split()),
                   Fraction(c), sense, cubicle)


def _sorted_desc(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(sorted((frac(v) for v in values), reverse=True))


@dataclass(frozen=True)
class ConstraintSystem:
    """Full half-space description of one shell configuration.

    ``inequalities``/``equalities`` hold the catalog content; normalization,
    ordering and box rows are generated by ``structural()``.  ``orbital_cap``
    is the upper box on each nu (``None`` only for the formal half-filled shell).
    """

    shell: ShellConfig
    inequalities: tuple[Inequality, ...]
    equalities: tuple[Inequality, ...] = ()
    ordered: bool = True
    orbital_cap: Fraction | None = Fraction(2)
    witness: tuple[tuple[Fraction, ...], tuple[Fraction, ...]] | None = field(default=None, compare=False)

    @property
    def nu_names(self) -> tuple[str, ...]:
        return tuple(f"nu{i + 1}" for i in range(self.shell.orbital_dim))

    @property
    def mu_names(self) -> tuple[str, ...]:
        return tuple(f"mu{j + 1}" for j in range(self.shell.multiplicity))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.nu_names + self.mu_names

    def _row(self, orbital=None, spin=None, bound=0, sense=LE, label=""):
        n, k = self.shell.orbital_dim, self.shell.multiplicity
        o = [Fraction(0)] * n
        s = [Fraction(0)] * k
        for i, v in (orbital or {}).items():
            o[i] = Fraction(v)
        for j, v in (spin or {}).items():
            s[j] = Fraction(v)
        return Inequality(tuple(o), tuple(s), bound, sense, label)

    def structural(self) -> list[Inequality]:
        n, k = self.shell.orbital_dim, self.shell.multiplicity
        rows = [self._row({i: 1 for i in range(n)}, bound=self.shell.electron_count, sense=EQ,
                          label="normalization")]
        if k:
            rows.append(self._row(spin={j: 1 for j in range(k)}, bound=1, sense=EQ, label="normalization"))
        if self.ordered:
            rows += [self._row({i + 1: 1, i: -1}, label="ordering") for i in range(n - 1)]
            rows += [self._row(spin={j + 1: 1, j: -1}, label="ordering") for j in range(k - 1)]
        rows += [self._row({i: -1}, label="box") for i in range(n)]
        if self.orbital_cap is not None:
            rows += [self._row({i: 1}, bound=self.orbital_cap, label="box") for i in range(n)]
        rows += [self._row(spin={j: -1}, label="box") for j in range(k)]
        rows += [self._row(spin={j: 1}, bound=1, label="box") for j in range(k)]
        return rows

    def rows(self) -> list[Inequality]:
        return list(self.inequalities) + list(self.equalities) + self.structural()

    def polytope(self) -> Polytope:
        return Polytope(self.variables, tuple(r.flat() for r in self.rows()))

    def table_polytope(self) -> Polytope:
        return Polytope(self.variables, tuple(r.flat() for r in list(self.inequalities) + list(self.equalities)))

    def canonical_point(self, nu, mu) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        nu = tuple(frac(v) for v in nu)
        mu = tuple(frac(v) for v in mu)
        if len(nu) != self.shell.orbital_dim or len(mu) != self.shell.multiplicity:
            raise DimensionMismatch(
                f"expected {self.shell.orbital_dim} orbital and {self.shell.multiplicity} spin values, "
                f"got {len(nu)} and {len(mu)}")
        if self.ordered:
            nu, mu = _sorted_desc(nu), _sorted_desc(mu)
        return nu, mu

    def check(self, nu, mu) -> tuple[bool, list[Inequality]]:
        """(all rows hold, violated rows) after sorting the spectra."""
        nu, mu = self.canonical_point(nu, mu)
        bad = [r for r in self.rows() if not r.holds(nu, mu)]
        return not bad, bad

    def restrict(self, nu) -> Polytope:
        """The moment polytope: spin rows with the orbital spectrum fixed."""
        nu = tuple(frac(v) for v in nu)
        if len(nu) != self.shell.orbital_dim:
            raise DimensionMismatch(f"expected {self.shell.orbital_dim} orbital values")
        if self.ordered:
            nu = _sorted_desc(nu)
        return self.polytope().fix(dict(zip(self.nu_names, nu)))

    def dump(self) -> str:
        lines = [f"# shell: {self.shell.key}",
                 f"# total_spin: {self.shell.total_spin}",
                 f"# ordered: {str(self.ordered).lower()}",
                 f"# orbital_cap: {self.orbital_cap if self.orbital_cap is not None else 'none'}"]
        current = None
        for r in list(self.inequalities) + list(self.equalities):
            if r.cubicle != current:
                current = r.cubicle
                lines.append(f"# cubicle {current}")
            lines.append(r.text())
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, shell: ShellConfig | None = None) -> "ConstraintSystem":
        meta: dict[str, str] = {}
        rows: list[Inequality] = []
        cubicle = ""
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("cubicle"):
                    cubicle = body[len("cubicle"):].strip()
                elif ":" in body:
                    k, _, v = body.partition(":")
                    if k.strip() in _META_KEYS:
                        meta.setdefault(k.strip(), v.strip())
                continue
            rows.append(Inequality.parse(line, cubicle))
        if shell is None:
            if "shell" not in meta:
                raise UnsupportedShell("system file carries no '# shell:' header")
            shell = ShellConfig.parse(meta["shell"])
            if "total_spin" in meta:
                shell = replace(shell, total_spin=Fraction(meta["total_spin"]))
        cap = meta.get("orbital_cap", "2")
        ordered = meta.get("ordered", "true") != "false"
        for r in rows:
            if len(r.orbital) != shell.orbital_dim or len(r.spin) != shell.multiplicity:
                raise DimensionMismatch(f"row {r.text()!r} does not match shell {shell.key}")
        return cls(shell, tuple(r for r in rows if r.sense == LE), tuple(r for r in rows if r.sense == EQ),
                   ordered, None if cap == "none" else Fraction(cap))


# ---------------------------------------------------------------------------
# resources


def _read_resource(name: str) -> str:
    data = resources.files("paulimag.data").joinpath(name).read_bytes()
    digest = hashlib.sha256(data).hexdigest()
    if digest != CHECKSUMS[name]:
        raise RuntimeError(f"constraint table {name} failed its checksum")
    return data.decode("utf-8")


def _table(name: str, shell: ShellConfig) -> ConstraintSystem:
    return ConstraintSystem.parse(_read_resource(name), shell)


def _witness(system: ConstraintSystem, nu, mu) -> ConstraintSystem:
    return replace(system, witness=(tuple(frac(v) for v in nu), tuple(frac(v) for v in mu)))


def _eq(n, k, orbital, spin, bound, label):
    o = [Fraction(0)] * n
    s = [Fraction(0)] * k
    for i, v in orbital.items():
        o[i] = Fraction(v)
    for j, v in spin.items():
        s[j] = Fraction(v)
    return Inequality(tuple(o), tuple(s), Fraction(bound), EQ, label)


def _degenerate(n_el: int) -> ConstraintSystem:
    shell = ShellConfig.d(n_el)
    k = shell.multiplicity
    F = Fraction
    if n_el == 5:
        eqs = (_eq(5, k, {}, {0: 1}, 1, "half-filled"), _eq(5, k, {0: 1}, {}, 5, "half-filled"))
        system = ConstraintSystem(shell, (), eqs, orbital_cap=None)
        return _witness(system, (5, 0, 0, 0, 0), (1,) + (0,) * (k - 1))
    if n_el == 4:
        eqs = tuple(_eq(5, k, {5 - (i + 1): 1}, {i: 1}, 1, "N=4") for i in range(k))
        return _witness(ConstraintSystem(shell, (), eqs), (F(4, 5),) * 5, (F(1, 5),) * 5)
    if n_el == 6:
        eqs = tuple(_eq(5, k, {i: -1}, {i: 1}, -1, "N=6") for i in range(k))
        return _witness(ConstraintSystem(shell, (), eqs), (F(6, 5),) * 5, (F(1, 5),) * 5)
    if n_el == 1:
        eqs = tuple(_eq(5, k, {i: -1}, {i: 1}, 0, "N=1") for i in range(k))
        return _witness(ConstraintSystem(shell, (), eqs), (F(1, 2), F(1, 2), 0, 0, 0), (F(1, 2), F(1, 2)))
    if n_el == 9:
        eqs = tuple(_eq(5, k, {5 - (i + 1): 1}, {i: 1}, 2, "N=9") for i in range(k))
        return _witness(ConstraintSystem(shell, (), eqs), (2, 2, 2, F(3, 2), F(3, 2)), (F(1, 2), F(1, 2)))
    raise UnsupportedShell(f"d{n_el} has no degenerate high-spin description")


def load_catalog(shell: ShellConfig) -> ConstraintSystem:
    """Verbatim constraint system for a supported shell (see ``supported_shells``)."""
    if shell.orbital_dim != 5 or shell.spin_sector == "spinless":
        raise UnsupportedShell(f"no spin-orbital catalog for {shell.key}")
    n_el, sector = shell.electron_count, shell.spin_sector
    if sector == "high" and shell.total_spin != Fraction(min(n_el, 10 - n_el), 2):
        raise UnsupportedShell(f"{shell.key} with S={shell.total_spin} is not a high-spin shell")
    F = Fraction
    if (n_el, sector) == (7, "high"):
        system = _table("d7_high.txt", shell)
        return _witness(system, (F(35, 24),) * 3 + (F(21, 16),) * 2, (F(11, 16), F(11, 48), F(1, 12), 0))
    if (n_el, sector) == (8, "high"):
        system = _table("d8_high.txt", shell)
        return _witness(system, (F(8, 5),) * 5, (F(2, 5), F(2, 5), F(1, 5)))
    if (n_el, sector) == (7, "low"):
        if shell.total_spin != F(1, 2):
            raise UnsupportedShell("only S=1/2 is implemented for low-spin d7")
        system = _table("d7_low.txt", shell)
        return _witness(system, (F(7, 5),) * 5, (F(1, 2), F(1, 2)))
    if (n_el, sector) == (3, "high"):
        return particle_hole_dual(load_catalog(ShellConfig.d(7)))
    if (n_el, sector) == (2, "high"):
        return particle_hole_dual(load_catalog(ShellConfig.d(8)))
    if sector == "high" and n_el in HIGH_SPIN_DEGENERATE:
        return _degenerate(n_el)
    raise UnsupportedShell(f"no constraint catalog for {shell.key}")


def supported_shells() -> list[ShellConfig]:
    return [ShellConfig.d(n) for n in range(1, 10)] + [ShellConfig.d(7, "low")]


def load_spinless_catalog(electron_count: int, orbital_dim: int) -> ConstraintSystem:
    """Purely orbital constraints for spin-polarized electrons."""
    n_el, n = electron_count, orbital_dim
    shell = ShellConfig(n_el, n, "spinless")
    cap = Fraction(1) if n_el <= n else Fraction(2)

    def row(idx: Iterable[int], bound, sense=LE, coeffs=None, label=""):
        o = [Fraction(0)] * n
        for pos, i in enumerate(idx):
            o[i] = Fraction(coeffs[pos] if coeffs else 1)
        return Inequality(tuple(o), (), Fraction(bound), sense, label)

    F = Fraction
    if (n_el, n) == (3, 7):
        sets = [(1, 2, 3, 4), (0, 2, 3, 5), (0, 1, 3, 6), (0, 1, 4, 5)]
        ineqs = tuple(row(s, 2, label="f3") for s in sets)
        return _witness(ConstraintSystem(shell, ineqs, orbital_cap=cap), (F(3, 7),) * 7, ())
    if n_el == 3 and n % 2 == 0 and n >= 6:
        ineqs = tuple(row((i, n - 1 - i), 1, label="three-electron") for i in range(n // 2))
        return _witness(ConstraintSystem(shell, ineqs, orbital_cap=cap), (F(3, n),) * n, ())
    if n_el == 2:
        eqs = [row((2 * i, 2 * i + 1), 0, EQ, (1, -1), "pairing") for i in range(n // 2)]
        if n % 2:
            eqs.append(row((n - 1,), 0, EQ, label="pairing"))
        pairs = n // 2
        nu = (F(1, pairs),) * (2 * pairs) + ((0,) if n % 2 else ())
        return _witness(ConstraintSystem(shell, (), tuple(eqs), orbital_cap=cap), nu, ())
    if n == 5 and n_el in (3, 7, 8):
        if n_el == 3:
            eqs = (row((0,), 1, EQ, label="shape"), row((1, 2), 0, EQ, (1, -1), "shape"),
                   row((3, 4), 0, EQ, (1, -1), "shape"))
            nu = (1, F(1, 2), F(1, 2), F(1, 2), F(1, 2))
        elif n_el == 7:
            eqs = (row((0, 1), 0, EQ, (1, -1), "shape"), row((2, 3), 0, EQ, (1, -1), "shape"),
                   row((4,), 1, EQ, label="shape"))
            nu = (F(3, 2),) * 4 + (1,)
        else:
            eqs = (row((0,), 2, EQ, label="shape"), row((1, 2), 0, EQ, (1, -1), "shape"),
                   row((3, 4), 0, EQ, (1, -1), "shape"))
            nu = (2,) + (F(3, 2),) * 4
        return _witness(ConstraintSystem(shell, (), eqs, orbital_cap=cap), nu, ())
    raise UnsupportedShell(f"no spinless catalog for {n_el} electrons in dimension {n}")


# ---------------------------------------------------------------------------
# transforms


def _dual_row(r: Inequality) -> Inequality:
    a = r.orbital
    return replace(r, orbital=tuple(-v for v in reversed(a)), bound=r.bound - 2 * sum(a, Fraction(0)))


def particle_hole_dual(system: ConstraintSystem) -> ConstraintSystem:
    """Rewrite every row under nu_i -> 2 - nu_{6-i}; N -> 10 - N, spin untouched."""
    shell = system.shell
    if shell.orbital_dim != 5 or shell.spin_sector == "spinless":
        raise ValueError("particle-hole duality is defined for spinful d-shells")
    if system.orbital_cap != 2:
        raise ValueError("particle-hole duality needs the 0 <= nu <= 2 box")
    dual_shell = replace(shell, electron_count=10 - shell.electron_count)
    out = ConstraintSystem(dual_shell, tuple(_dual_row(r) for r in system.inequalities),
                           tuple(_dual_row(r) for r in system.equalities), system.ordered, system.orbital_cap)
    if system.witness is not None:
        nu, mu = system.witness
        out = replace(out, witness=(tuple(2 - v for v in reversed(nu)), mu))
    return out


def cubicle_report(system: ConstraintSystem) -> dict[str, dict]:
    """Group rows by cubicle label and compare each row to the block majority.

    Rows whose (sorted a, sorted b, c) signature differs from the most common
    one in their block are listed as outliers.
    """
    blocks: dict[str, list[Inequality]] = {}
    for r in list(system.inequalities) + list(system.equalities):
        blocks.setdefault(r.cubicle, []).append(r)
    report = {}
    for label, rows in blocks.items():
        counts = Counter(r.signature() for r in rows)
        majority, size = counts.most_common(1)[0]
        report[label] = {
            "rows": len(rows),
            "majority": size,
            "outliers": [r.text() for r in rows if r.signature() != majority],
        }
    return report


# ---------------------------------------------------------------------------
# symmetry specialization


@dataclass(frozen=True)
class SymmetrySpec:
    """Crystal-field parametrization of the orbital spectrum.

    ``parameters`` maps names to a value, or to ``None`` for a symbolic
    parameter that stays a variable of the specialized system.

    bcc: (a, a, a, b, b), b = (N - 3a)/2     fcc: (b, b, a, a, a), b = (N - 3a)/2
    hexagonal: (a, b, b, c, c), c = (N - a - 2b)/2
    spherical: all equal to N/5               free: explicit ``nu1..nu5``
    """

    kind: str
    parameters: tuple[tuple[str, Fraction | None], ...] = ()

    def __post_init__(self):
        if self.kind not in ("bcc", "fcc", "spherical", "hexagonal", "free"):
            raise ValueError(f"unknown symmetry {self.kind!r}")
        object.__setattr__(self, "parameters", tuple(
            (k, None if v is None else frac(v)) for k, v in dict(self.parameters).items()))

    @classmethod
    def bcc(cls, a=None):
        return cls("bcc", (("a", a),))

    @classmethod
    def fcc(cls, a=None):
        return cls("fcc", (("a", a),))

    @classmethod
    def hexagonal(cls, a=None, b=None):
        return cls("hexagonal", (("a", a), ("b", b)))

    @classmethod
    def spherical(cls):
        return cls("spherical")

    @classmethod
    def free(cls, nu):
        return cls("free", tuple((f"nu{i + 1}", v) for i, v in enumerate(nu)))

    @property
    def symbolic(self) -> tuple[str, ...]:
        return tuple(k for k, v in self.parameters if v is None)

    def induced(self, electron_count: int) -> list[tuple[Fraction, dict[str, Fraction]]]:
        """Each nu_i as ``(constant, {symbolic parameter: coefficient})``."""
        n = Fraction(electron_count)
        params = dict(self.parameters)

        def var(name):
            v = params[name]
            return (Fraction(0), {name: Fraction(1)}) if v is None else (v, {})

        def affine(const, *terms):
            c, lin = Fraction(const), {}
            for coef, (tc, tl) in terms:
                c += coef * tc
                for k, v in tl.items():
                    lin[k] = lin.get(k, Fraction(0)) + coef * v
            return c, {k: v for k, v in lin.items() if v}

        if self.kind == "spherical":
            return [(n / 5, {})] * 5
        if self.kind == "free":
            return [var(f"nu{i + 1}") for i in range(5)]
        if self.kind in ("bcc", "fcc"):
            a = affine(0, (1, var("a")))
            b = affine(n / 2, (Fraction(-3, 2), var("a")))
            return [a, a, a, b, b] if self.kind == "bcc" else [b, b, a, a, a]
        a = affine(0, (1, var("a")))
        b = affine(0, (1, var("b")))
        c = affine(n / 2, (Fraction(-1, 2), var("a")), (-1, var("b")))
        return [a, b, b, c, c]

    def nu(self, electron_count: int) -> tuple[Fraction, ...]:
        if self.symbolic:
            raise ValueError("symmetry has symbolic parameters")
        return tuple(c for c, _ in self.induced(electron_count))


@dataclass(frozen=True)
class SpecializedSystem:
    """Constraints in mu (and symbolic crystal-field parameters).

    ``inequalities`` are the irredundant table-derived rows; ``structural``
    holds normalization, ordering/box rows and the parameter range, kept
    unconditionally.  Variables are the symbolic parameters then mu.
    """

    source: ConstraintSystem
    symmetry: SymmetrySpec
    variables: tuple[str, ...]
    inequalities: tuple[Row, ...]
    structural: tuple[Row, ...]

    @property
    def parameters(self) -> tuple[str, ...]:
        return self.symmetry.symbolic

    @property
    def mu_names(self) -> tuple[str, ...]:
        return self.source.mu_names

    def polytope(self) -> Polytope:
        return Polytope(self.variables, self.structural + self.inequalities)

    def at(self, **values) -> Polytope:
        """The mu polytope for concrete parameter values."""
        return self.polytope().fix({k: frac(v) for k, v in values.items()})

    def homogeneous(self) -> list[tuple[tuple[Fraction, ...], ...]]:
        """Rows as ``sum_j coeff_j(params) mu_j <= 0`` using sum(mu) = 1.

        Each row is a tuple over mu_j of ``(constant, d/dparam...)``, scaled to
        coprime integers; this is the printed form of the BCC list.
        """
        return [homogenize(r, self.parameters, len(self.mu_names)) for r in self.inequalities]


def homogenize(row: Row, parameters: Sequence[str], k: int) -> tuple[tuple[Fraction, ...], ...]:
    p = len(parameters)
    pcoef = row.coeffs[:p]
    mu = row.coeffs[p:p + k]
    flat = []
    for j in range(k):
        flat.append(mu[j] - row.bound)
        flat.extend(pcoef)
    denom = math.lcm(*(v.denominator for v in flat))
    ints = [int(v * denom) for v in flat]
    g = math.gcd(*ints) or 1
    ints = [Fraction(v // g) for v in ints]
    return tuple(tuple(ints[j * (p + 1):(j + 1) * (p + 1)]) for j in range(k))


def specialize(system: ConstraintSystem, sym: SymmetrySpec) -> SpecializedSystem:
    """Substitute the symmetric orbital spectrum and drop redundant rows.

    Rows are affine jointly in (parameters, mu), so redundancy is decided
    exactly over the joint polytope; orbital rows turn into the parameter range.
    """
    if system.shell.orbital_dim != 5:
        raise UnsupportedShell("symmetry specialization is defined for d-shells")
    induced = sym.induced(system.shell.electron_count)
    params = sym.symbolic
    k = system.shell.multiplicity
    variables = params + system.mu_names

    def convert(r: Inequality) -> Row:
        pc = [Fraction(0)] * len(params)
        shift = Fraction(0)
        for coef, (const, lin) in zip(r.orbital, induced):
            if not coef:
                continue
            shift += coef * const
            for name, v in lin.items():
                pc[params.index(name)] += coef * v
        return Row(tuple(pc) + r.spin, r.bound - shift, r.sense, r.cubicle)

    structural: list[Row] = []
    candidates: list[Row] = []
    for r in system.rows():
        row = convert(r)
        if not any(row.coeffs):
            ok = row.bound == 0 if row.sense == EQ else row.bound >= 0
            if not ok:
                raise InfeasibleSymmetry(f"induced spectrum violates {r.cubicle or 'a'} row {r.text()}")
            continue
        is_table = r.cubicle not in ("normalization", "ordering", "box")
        if is_table and r.sense == LE and any(row.coeffs[len(params):]):
            candidates.append(row)
        else:
            structural.append(row)
    joint = Polytope(variables, tuple(structural) + tuple(candidates))
    if not is_feasible(joint):
        raise InfeasibleSymmetry(f"{sym.kind} spectrum is incompatible with {system.shell.key}")
    cleaned = remove_redundant(joint, protected=range(len(structural)))
    return SpecializedSystem(system, sym, variables, cleaned.rows[len(structural):], tuple(structural))


def parameter_interval(spec: SpecializedSystem, name: str) -> tuple[Fraction, Fraction]:
    from .polytope import lp_optimize

    poly = spec.polytope()
    e = poly.vector({name: 1})
    return lp_optimize(poly, e, "min").value, lp_optimize(poly, e, "max").value


# Printed form of the BCC d7 list: per row, per mu_j, (constant, coefficient of a).
PRINTED_BCC_D7: tuple[tuple[tuple[int, int], ...], ...] = (
    ((3, -2), (3, -2), (2, -2), (2, -2)),
    ((-3, 2), (-3, 2), (-4, 2), (-3, 2)),
    ((11, -7), (9, -7), (7, -7), (9, -7)),
    ((-11, 7), (-13, 7), (-11, 7), (-9, 7)),
    ((-1, 1), (-3, 1), (-2, 1), (-2, 1)),
    ((2, -1), (0, -1), (1, -1), (0, -1)),
    ((-4, 3), (-6, 3), (-5, 3), (-6, 3)),
    ((-17, 9), (-15, 9), (-13, 9), (-11, 9)),
    ((23, -15), (17, -15), (19, -15), (21, -15)),
)


def printed_bcc_row(index: int, a) -> tuple[Fraction, ...]:
    """Homogeneous coefficients of printed BCC row ``index`` (0-based) at ``a``."""
    a = frac(a)
    return tuple(Fraction(c) + Fraction(s) * a for c, s in PRINTED_BCC_D7[index])
