"""Thurstone Case V scaling of pairwise "judged finer" proportions.

The matrix convention follows the fineness study this package replicates:
p[row][col] is the proportion of trials in which the column texture was
judged finer than the row texture.  Scale values are column means of the
inverse-normal transform over the off-diagonal rows, anchored so the
least-fine texture sits at zero.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .harness import TrialRecord

__all__ = [
    "ConsistencyReport",
    "PairwiseMatrix",
    "ScaleValues",
    "consistency_check",
    "display_proportion",
    "inv_norm_cdf",
    "load_reference_matrix",
    "matrix_from_csv",
    "matrix_to_csv",
    "norm_cdf",
    "scales_to_csv",
    "tally_matrix",
    "thurstone_case_v",
]

COMPLEMENTARITY_SLACK = 0.01  # two-decimal display rounding allowance


def norm_cdf(z: float) -> float:
    """Standard normal CDF."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


# Rational approximation coefficients (Acklam), refined below to full
# double precision with one Halley step.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def inv_norm_cdf(p: float) -> float:
    """Inverse standard normal CDF, accurate to well below 1e-8 absolute."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    elif p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
              / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    # Halley refinement against the erfc-based CDF
    e = norm_cdf(x) - p
    u = e * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


@dataclass(frozen=True)
class PairwiseMatrix:
    """n x n proportions, p[row][col] = fraction judging col finer than row.

    ``wins``/``totals`` carry the exact integer counts when the matrix was
    tallied from trial records; display rounding then works on exact
    fractions.  Off-diagonal NaN marks a pair with no trials.
    """

    labels: tuple[int, ...]
    p: np.ndarray
    n_per_pair: int = 40
    wins: np.ndarray | None = None
    totals: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.labels)
        if n < 2:
            raise ValueError("matrix needs at least 2 labels")
        if len(set(self.labels)) != n:
            raise ValueError("labels must be unique")
        p = np.asarray(self.p, dtype=float)
        if p.shape != (n, n):
            raise ValueError(f"proportion matrix must be {n}x{n}")
        off = ~np.eye(n, dtype=bool)
        vals = p[off]
        finite = vals[~np.isnan(vals)]
        if finite.size and (finite.min() < 0.0 or finite.max() > 1.0):
            raise ValueError("proportions must lie in [0, 1]")
        if self.n_per_pair < 1:
            raise ValueError("n_per_pair must be >= 1")
        object.__setattr__(self, "p", p)
        p.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    def missing_cells(self) -> list[tuple[int, int]]:
        out = []
        for i in range(self.n):
            for j in range(self.n):
                if i != j and np.isnan(self.p[i, j]):
                    out.append((i, j))
        return out

    def complementarity_violations(self, slack: float = COMPLEMENTARITY_SLACK) -> list[str]:
        msgs = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                a, b = self.p[i, j], self.p[j, i]
                if np.isnan(a) or np.isnan(b):
                    continue
                if abs(a + b - 1.0) > slack + 1e-12:
                    msgs.append(
                        f"p[{self.labels[i]}][{self.labels[j]}] + "
                        f"p[{self.labels[j]}][{self.labels[i]}] = {a + b:.4f}"
                    )
        return msgs


@dataclass(frozen=True)
class ScaleValues:
    """Per-label fineness scale, minimum anchored exactly to zero."""

    labels: tuple[int, ...]
    values: np.ndarray
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        v.setflags(write=False)

    def value_of(self, label: int) -> float:
        return float(self.values[self.labels.index(label)])


@dataclass(frozen=True)
class ConsistencyReport:
    mad: float
    chi_square: float
    dof: int


def thurstone_case_v(m: PairwiseMatrix) -> ScaleValues:
    """Case V scale values from a pairwise proportion matrix.

    Off-diagonal proportions are clamped to
    [1/(2 n_per_pair), 1 - 1/(2 n_per_pair)] before the inverse-normal
    transform; the raw scale of label j is the mean of column j's z over
    the n-1 off-diagonal rows, shifted so the minimum is exactly 0.
    Complementarity violations beyond the display-rounding slack are
    attached as warnings, not errors.
    """
    if m.missing_cells():
        raise ValueError(f"matrix has untested pairs: {m.missing_cells()}")
    n = m.n
    lo = 1.0 / (2.0 * m.n_per_pair)
    z = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            z[i, j] = inv_norm_cdf(min(max(m.p[i, j], lo), 1.0 - lo))
    off = ~np.eye(n, dtype=bool)
    raw = np.array([z[off[:, j], j].mean() for j in range(n)])
    anchored = raw - raw.min()
    return ScaleValues(m.labels, anchored, tuple(m.complementarity_violations()))


def consistency_check(m: PairwiseMatrix, s: ScaleValues) -> ConsistencyReport:
    """Goodness of fit of the scale values to the observed proportions.

    The column-mean estimator spreads scale differences by n/(n-1), so the
    fit maps them back before the normal transform; a perfectly consistent
    matrix therefore reports zero deviation.  mad is the mean |p - p_hat|
    over the upper triangle; chi_square is the plain Pearson sum
    n_per_pair (p - p_hat)^2 / (p_hat (1 - p_hat)) over unordered pairs,
    dof = n(n-1)/2 - (n-1).
    """
    if m.labels != s.labels:
        raise ValueError("matrix and scale labels do not match")
    n = m.n
    gain = (n - 1) / n
    abs_dev, chi = [], 0.0
    for i in range(n):
        for j in range(i + 1, n):
            fitted = norm_cdf(float(s.values[j] - s.values[i]) * gain)
            obs = m.p[i, j]
            if np.isnan(obs):
                continue
            abs_dev.append(abs(obs - fitted))
            chi += m.n_per_pair * (obs - fitted) ** 2 / (fitted * (1.0 - fitted))
    dof = n * (n - 1) // 2 - (n - 1)
    return ConsistencyReport(float(np.mean(abs_dev)), float(chi), dof)


def tally_matrix(
    records: list[TrialRecord],
    labels: tuple[int, ...] | None = None,
) -> PairwiseMatrix:
    """Pool trial records into a pairwise proportion matrix.

    Both presentation orders of a pair are pooled; wins[i][j] counts trials
    of pair {i, j} in which the label-j texture was chosen.  Pairs with no
    trials are left NaN (thurstone_case_v rejects such matrices).
    """
    if labels is None:
        labels = tuple(sorted({r.first_px for r in records} | {r.second_px for r in records}))
    index = {lab: k for k, lab in enumerate(labels)}
    n = len(labels)
    wins = np.zeros((n, n), dtype=np.int64)
    for r in records:
        if r.first_px not in index or r.second_px not in index:
            raise ValueError(
                f"record pair ({r.first_px}, {r.second_px}) outside labels {labels}"
            )
        chosen = r.first_px if r.response.value == "first" else r.second_px
        other = r.second_px if chosen == r.first_px else r.first_px
        wins[index[other], index[chosen]] += 1
    totals = wins + wins.T
    with np.errstate(invalid="ignore"):
        p = np.where(totals > 0, wins / np.where(totals > 0, totals, 1), np.nan)
    np.fill_diagonal(p, np.nan)
    per_pair = totals[~np.eye(n, dtype=bool)]
    tested = per_pair[per_pair > 0]
    n_per_pair = int(tested[0]) if tested.size else 1
    return PairwiseMatrix(labels, p, n_per_pair=n_per_pair, wins=wins, totals=totals)


def display_proportion(wins: int, total: int) -> float:
    """Round wins/total half-away-from-zero to 2 decimals, exactly."""
    if total <= 0:
        raise ValueError("total must be positive")
    return ((wins * 200 + total) // (2 * total)) / 100.0


def _display_float(p: float) -> float:
    # float fuzz guard before half-away rounding (0.175 stored as 0.17499..)
    scaled = p * 100.0
    nearest = round(scaled)
    if abs(scaled - nearest) < 1e-9:
        return nearest / 100.0
    return math.floor(scaled + 0.5) / 100.0


def matrix_to_csv(m: PairwiseMatrix, display: bool = True) -> str:
    """Matrix CSV: header ``label,<l1>,...``, empty diagonal cells.

    With ``display`` the cells are rounded half-away-from-zero to two
    decimals (exactly, via the integer counts when available)."""
    out = io.StringIO()
    out.write("label," + ",".join(str(l) for l in m.labels) + "\n")
    for i, lab in enumerate(m.labels):
        cells = []
        for j in range(m.n):
            if i == j or np.isnan(m.p[i, j]):
                cells.append("")
            elif display and m.wins is not None and m.totals is not None:
                cells.append(f"{display_proportion(int(m.wins[i, j]), int(m.totals[i, j])):.2f}")
            elif display:
                cells.append(f"{_display_float(float(m.p[i, j])):.2f}")
            else:
                cells.append(repr(float(m.p[i, j])))
        out.write(f"{lab}," + ",".join(cells) + "\n")
    return out.getvalue()


def matrix_from_csv(text: str, n_per_pair: int = 40) -> PairwiseMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("label,"):
        raise ValueError("matrix CSV must start with header 'label,<labels...>'")
    labels = tuple(int(tok) for tok in lines[0].split(",")[1:])
    n = len(labels)
    if len(lines) != n + 1:
        raise ValueError(f"expected {n} data rows, got {len(lines) - 1}")
    p = np.full((n, n), np.nan)
    for i, ln in enumerate(lines[1:]):
        parts = ln.split(",")
        if len(parts) != n + 1:
            raise ValueError(f"row {i + 2}: expected {n + 1} columns, got {len(parts)}")
        if int(parts[0]) != labels[i]:
            raise ValueError(f"row {i + 2}: row label {parts[0]} out of order")
        for j, cell in enumerate(parts[1:]):
            if cell.strip() == "":
                continue
            p[i, j] = float(cell)
    return PairwiseMatrix(labels, p, n_per_pair=n_per_pair)


def scales_to_csv(s: ScaleValues) -> str:
    out = io.StringIO()
    out.write("label,scale\n")
    for lab, val in zip(s.labels, s.values):
        out.write(f"{lab},{float(val)!r}\n")
    return out.getvalue()


def load_reference_matrix() -> PairwiseMatrix:
    """Bundled pairwise fineness judgments for the six stripe textures
    (five participants, 40 trials per pair, two-decimal proportions)."""
    text = (resources.files("vibrotex") / "data" / "pairwise_fineness_reference.csv").read_text()
    return matrix_from_csv(text, n_per_pair=40)
