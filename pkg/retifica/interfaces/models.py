from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from retifica.core.forms import BiForm, MultiPoly, Scalar

__all__ = [
    "ParamSurface",
    "LambdaRealization",
    "MonoidSystem",
    "Monoid",
    "RationalMap",
    "CremonaMap",
    "ProjectionStep",
    "RectificationStep",
    "RectificationTrace",
    "RunConfig",
    "LemmaParams",
    "BoundReport",
    "EllMFit",
    "WitnessVerdict",
    "OrbitResult",
]

VERTEX_NAMES = {0: "p0", 4: "p4"}


@dataclass(frozen=True)
class ParamSurface:
    """
    Rational map P1 x P1 -> P^n given by ``n + 1`` forms of one bidegree.

    Use :func:`retifica.surfaces.make_surface` to build one with the
    fixed-component and dimension checks applied.
    """

    forms: Tuple[BiForm, ...]

    def __post_init__(self):
        if len(self.forms) < 2:
            raise ValueError("A surface needs at least two forms")
        nonzero = {f.bidegree for f in self.forms if f}
        if len(nonzero) != 1:
            raise ValueError(f"Forms must share one bidegree, got {sorted(nonzero)}")

    @property
    def ambient_dim(self) -> int:
        return len(self.forms) - 1

    @property
    def bidegree(self) -> Tuple[int, int]:
        return next(f.bidegree for f in self.forms if f)

    @property
    def ruling_degree(self) -> int:
        return self.bidegree[0]

    @property
    def section_degree(self) -> int:
        return self.bidegree[1]

    def point(self, s: Scalar, t: Scalar, u: Scalar, v: Scalar) -> List[Fraction]:
        return [f.at(s, t, u, v) for f in self.forms]

    def drop(self, i: int) -> Tuple[BiForm, ...]:
        return self.forms[:i] + self.forms[i + 1 :]


@dataclass(frozen=True)
class LambdaRealization:
    base: ParamSurface
    beta: int
    gamma: BiForm
    m_form: BiForm
    fibers: Tuple[BiForm, ...]
    result: ParamSurface
    seed: int = 0

    @property
    def fiber_product(self) -> BiForm:
        out = self.fibers[0]
        for f in self.fibers[1:]:
            out = out * f
        return out

    @property
    def expected_degree(self) -> int:
        a, b = self.base.bidegree
        return a * (2 * b + self.beta)


@dataclass(frozen=True)
class MonoidSystem:
    d: int
    vertexes: Tuple[int, ...]
    basis: Tuple[MultiPoly, ...]
    constraints: Optional[ParamSurface] = None
    cone_free: bool = False
    h0_restricted: Optional[int] = None

    @property
    def dim(self) -> int:
        """Projective dimension; -1 for the empty system."""
        return len(self.basis) - 1

    def element(self, coeffs: Sequence[Scalar]) -> MultiPoly:
        return MultiPoly.from_coefficients(self.basis, coeffs)


@dataclass(frozen=True)
class Monoid:
    """
    A form of degree ``d`` with multiplicity exactly ``d - 1`` at each
    recorded vertex.

    ``pieces`` is ``(F_{d-1}, F_d)`` for the single vertex ``p0`` and
    ``(G_{d-2}, G'_{d-1}, G''_{d-1}, G_d)`` for the pair ``p0, p4``.
    """

    form: MultiPoly
    vertexes: Tuple[int, ...]
    pieces: Tuple[MultiPoly, ...] = field(default=(), compare=False)

    @property
    def d(self) -> int:
        return self.form.degree


@dataclass(frozen=True)
class RationalMap:
    source_dim: int
    target_dim: int
    components: Tuple[MultiPoly, ...]
    gcd_skipped: bool = False

    def __post_init__(self):
        if len(self.components) != self.target_dim + 1:
            raise ValueError("Component count does not match the target dimension")
        if all(c.is_zero() for c in self.components):
            raise ValueError("All components vanish")
        degrees = {c.degree for c in self.components if c}
        if len(degrees) != 1:
            raise ValueError(f"Components must share one degree, got {sorted(degrees)}")
        if any(c.num_vars != self.source_dim + 1 for c in self.components):
            raise ValueError("Component ring does not match the source dimension")

    @property
    def degree(self) -> int:
        return next(c.degree for c in self.components if c)

    def __call__(self, point: Sequence[Scalar]) -> List[Fraction]:
        return [c.evaluate(point) for c in self.components]


@dataclass(frozen=True)
class CremonaMap:
    forward: RationalMap
    inverse: RationalMap
    source_monoid: Optional[Monoid] = None

    @property
    def degrees(self) -> Tuple[int, int]:
        return self.forward.degree, self.inverse.degree

    def inverted(self) -> "CremonaMap":
        return CremonaMap(self.inverse, self.forward, self.source_monoid)


@dataclass
class ProjectionStep:
    index: int
    beta: int
    d: int
    seed: int
    realization: LambdaRealization
    monoid: Monoid
    cremona: CremonaMap
    surface: ParamSurface
    seconds: float = 0.0


@dataclass
class RectificationStep:
    start: ParamSurface
    normalization: CremonaMap
    gamma: BiForm
    projections: List[ProjectionStep]
    result: ParamSurface
    seed: int
    search_log: List[str] = field(default_factory=list)


@dataclass
class RectificationTrace:
    initial: ParamSurface
    final: ParamSurface
    steps: List[RectificationStep]
    seed: int

    @property
    def maps(self) -> List[CremonaMap]:
        """The applied maps in order, normalizations included."""
        out = []
        for step in self.steps:
            out.append(step.normalization)
            out.extend(p.cremona.inverted() for p in step.projections)
        return out


@dataclass
class RunConfig:
    seed: int = 0
    height: int = 20
    beta_max: int = 4
    d_max: int = 8
    precision: int = 50
    trials: int = 100
    four_projection: bool = False
    output: Optional[str] = None
    timings: bool = False
    draws: int = 20
    retries: int = 10

    def __post_init__(self):
        for name in ("height", "beta_max", "d_max", "precision", "trials", "draws", "retries"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass
class LemmaParams:
    a: int
    b: int
    beta: int
    d: int
    g: int = 0
    ell: Fraction = Fraction(0)
    m: Fraction = Fraction(0)

    @property
    def h(self) -> Fraction:
        return Fraction(self.d, self.a)

    @property
    def delta(self) -> int:
        return self.a * (2 * self.b + self.beta)


@dataclass
class BoundReport:
    name: str
    lhs: Any
    rhs: Any
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def margin(self):
        return self.lhs - self.rhs

    @property
    def verdict(self) -> bool:
        return self.margin > 0

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "params": {k: str(v) for k, v in self.params.items()},
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "margin": str(self.margin),
            "verdict": self.verdict,
        }


@dataclass
class EllMFit:
    ell: Fraction
    m: Fraction
    degrees: List[int]
    h0: List[int]
    residuals: List[Fraction]

    @property
    def residual_scale(self) -> Fraction:
        return max((abs(r) for r in self.residuals), default=Fraction(0))


@dataclass
class WitnessVerdict:
    a: int
    deg_d: int
    deg_b: int
    surface_degree: int
    surface_criterion: Fraction
    scroll_degree: int
    scroll_criterion: Fraction
    branch: str
    equivalent: bool


@dataclass
class OrbitResult:
    scroll: ParamSurface
    cremona: CremonaMap
    monoids: List[Monoid]
    surface: ParamSurface
    status: str
    trace: Optional[RectificationTrace] = None
    message: str = ""

    @property
    def ruling_degree(self) -> int:
        return self.surface.ruling_degree
