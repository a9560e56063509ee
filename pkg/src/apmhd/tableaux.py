"""Double Butcher tableaux for the semi-implicit IMEX-RK integrator.

A pair couples an explicit (strictly lower triangular) tableau with a
diagonally implicit one sharing the stage count.  The final update uses
the implicit weights b; when the implicit part is stiffly accurate
(b equals the last row of A) the step output equals the last implicit
stage.  Pairs are loaded from a plain-text registry; the first-order
pair is also hardcoded here.
"""

import importlib.resources
from dataclasses import dataclass, field

import numpy as np

ORDER_TOL = 1e-12


@dataclass(frozen=True)
class ButcherPair:
    name: str
    A_exp: np.ndarray  # explicit matrix, strictly lower triangular
    b_exp: np.ndarray
    A_imp: np.ndarray  # diagonally implicit matrix
    b_imp: np.ndarray

    @property
    def stages(self):
        return self.A_imp.shape[0]

    @property
    def c_exp(self):
        return self.A_exp.sum(axis=1)

    @property
    def c_imp(self):
        return self.A_imp.sum(axis=1)

    @property
    def stiffly_accurate(self):
        return bool(np.allclose(self.b_imp, self.A_imp[-1], rtol=0.0, atol=ORDER_TOL))


def first_order_pair():
    """The single-stage pair of the base scheme: explicit tableau has a
    zero row with unit weight; implicit has a11 = 1 = b."""
    return ButcherPair(
        name="first_order_si",
        A_exp=np.array([[0.0]]),
        b_exp=np.array([1.0]),
        A_imp=np.array([[1.0]]),
        b_imp=np.array([1.0]),
    )


@dataclass
class TableauReport:
    """Structured validation outcome."""

    name: str
    violations: list = field(default_factory=list)
    order_residuals: dict = field(default_factory=dict)
    stiffly_accurate: bool = False

    @property
    def valid(self):
        return not self.violations


def _order_conditions(pair):
    """Residuals of the order conditions through order 3.

    Conditions are checked classically per tableau (with each weight
    vector) and for the coupled update, which weights every stage value
    by the implicit b regardless of which tableau built its arguments:
    all order-3 trees with mixed explicit/implicit node colorings.
    """
    At, bt, A, b = pair.A_exp, pair.b_exp, pair.A_imp, pair.b_imp
    ct, c = pair.c_exp, pair.c_imp
    res = {}

    def put(tag, val, target):
        res[tag] = float(val - target)

    # classical, explicit tableau with its own weights
    put("exp_b1", bt.sum(), 1.0)
    put("exp_b2", bt @ ct, 0.5)
    put("exp_b3a", bt @ ct**2, 1.0 / 3.0)
    put("exp_b3b", bt @ At @ ct, 1.0 / 6.0)
    # classical, implicit tableau
    put("imp_b1", b.sum(), 1.0)
    put("imp_b2", b @ c, 0.5)
    put("imp_b3a", b @ c**2, 1.0 / 3.0)
    put("imp_b3b", b @ A @ c, 1.0 / 6.0)
    # coupled conditions with the shared update weights b
    put("mix_b2", b @ ct, 0.5)
    put("mix_b3_tt", b @ (ct * ct), 1.0 / 3.0)
    put("mix_b3_tc", b @ (ct * c), 1.0 / 3.0)
    for tag, M, cc in (("mix_AtCt", At, ct), ("mix_AtC", At, c),
                       ("mix_ACt", A, ct)):
        put(tag, b @ M @ cc, 1.0 / 6.0)
    return res


def validate_tableau(pair, order=3):
    """Check triangularity, node consistency, the stiffly accurate flag,
    and order conditions up to ``order`` (1, 2, or 3)."""
    rep = TableauReport(name=pair.name)
    s = pair.stages
    if pair.A_exp.shape != (s, s) or pair.b_exp.shape != (s,) or pair.b_imp.shape != (s,):
        rep.violations.append("shape mismatch between tableaux")
        return rep
    if np.any(np.abs(np.triu(pair.A_exp)) > 0.0):
        rep.violations.append("explicit matrix not strictly lower triangular")
    if np.any(np.abs(np.triu(pair.A_imp, k=1)) > 0.0):
        rep.violations.append("implicit matrix not lower triangular")
    if np.any(np.diag(pair.A_imp) < 0.0):
        rep.violations.append("negative implicit diagonal entry")

    rep.stiffly_accurate = pair.stiffly_accurate
    rep.order_residuals = _order_conditions(pair)

    keys1 = ["exp_b1", "imp_b1"]
    keys2 = ["exp_b2", "imp_b2", "mix_b2"]
    keys3 = ["exp_b3a", "exp_b3b", "imp_b3a", "imp_b3b",
             "mix_b3_tt", "mix_b3_tc", "mix_AtCt", "mix_AtC", "mix_ACt"]
    checked = keys1 + (keys2 if order >= 2 else []) + (keys3 if order >= 3 else [])
    for k in checked:
        if abs(rep.order_residuals[k]) > ORDER_TOL:
            rep.violations.append(
                f"order condition {k} violated by {rep.order_residuals[k]:.3e}")
    return rep


def parse_registry(text):
    """Parse the plain-text registry: blocks of
    name / s / s rows of A_exp / b_exp / s rows of A_imp / b_imp,
    '#' comments allowed, blocks separated by blank lines."""
    pairs = {}
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    i = 0
    while i < len(lines):
        if not lines[i].startswith("name"):
            raise ValueError(f"registry: expected 'name', got {lines[i]!r}")
        name = lines[i].split(None, 1)[1]
        s = int(lines[i + 1].split(None, 1)[1])
        i += 2

        def rows(k):
            nonlocal i
            out = np.array([[float(x) for x in lines[i + r].split()] for r in range(k)])
            i += k
            return out

        A_exp = rows(s)
        b_exp = rows(1)[0]
        A_imp = rows(s)
        b_imp = rows(1)[0]
        pair = ButcherPair(name=name, A_exp=A_exp, b_exp=b_exp,
                           A_imp=A_imp, b_imp=b_imp)
        rep = validate_tableau(pair, order=1)
        if not rep.valid:
            raise ValueError(f"registry tableau {name!r} invalid: {rep.violations}")
        pairs[name] = pair
    return pairs


def load_registry(path=None):
    """Load all pairs from a registry file (default: packaged registry)."""
    if path is None:
        text = importlib.resources.files("apmhd").joinpath(
            "data/tableaux.txt").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return parse_registry(text)


def load_tableau(name, path=None):
    if name == "first_order_si":
        return first_order_pair()
    reg = load_registry(path)
    if name not in reg:
        raise KeyError(f"unknown tableau {name!r}; registry has {sorted(reg)}")
    return reg[name]
