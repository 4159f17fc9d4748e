"""
Fixed-effects OLS / linear probability models with village-clustered
standard errors, and the nine network-index specifications.

Every model regresses an MGNREGS outcome on one network index plus
household controls, with either village fixed effects (absorbed by the
within transformation) or village characteristics and state dummies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd
from scipy import linalg, stats

DAY_CAP = 100
KINDS = ("binary", "count", "continuous", "categorical", "id")

HOUSEHOLD_CONTROLS = (
    "caste",
    "low_skilled",
    "education",
    "stable_occupation",
    "remittance",
    "land_acres",
    "asset_index",
    "political_member",
    "mediates_disputes",
    "visits_officials",
)
VILLAGE_CONTROLS = (
    "state",
    "distance_town",
    "irrigated_share",
    "rainfall_mm",
    "agri_share",
    "clientelism_score",
)
OUTCOMES = ("participation", "days_worked")


class RankDeficiencyError(ValueError):
    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__(f"design matrix is rank deficient; collinear column(s): {self.columns}")


def truncate_days(v: float) -> float:
    if v < 0:
        raise ValueError(f"days worked cannot be negative, got {v}")
    return min(v, DAY_CAP)


@dataclass
class Dataset:
    """Household rows plus a kind for every column (binary, count, continuous, categorical, id)."""

    frame: pd.DataFrame
    kinds: dict
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = [c for c in self.frame.columns if c not in self.kinds]
        if missing:
            raise ValueError(f"no kind recorded for column(s) {missing}")
        bad = {c: k for c, k in self.kinds.items() if k not in KINDS}
        if bad:
            raise ValueError(f"unknown column kind(s) {bad}")
        if self.frame.isna().any().any():
            cols = list(self.frame.columns[self.frame.isna().any()])
            raise ValueError(f"missing cells in column(s) {cols}")
        if "days_worked" in self.frame:
            d = self.frame["days_worked"]
            if (d < 0).any() or (d > DAY_CAP).any():
                raise ValueError("days_worked must lie in [0, 100]")

    def to_csv(self, path) -> Path:
        """Write ``path`` and a ``.json`` sidecar holding column kinds and metadata."""
        path = Path(path)
        self.frame.to_csv(path, index=False, lineterminator="\n", float_format="%.10g")
        sidecar = path.with_suffix(".json")
        sidecar.write_text(json.dumps({"kinds": self.kinds, "meta": self.meta}, indent=2, sort_keys=True) + "\n")
        return sidecar

    @classmethod
    def read_csv(cls, path) -> "Dataset":
        path = Path(path)
        side = json.loads(path.with_suffix(".json").read_text())
        kinds = side["kinds"]
        dtypes = {c: str for c, k in kinds.items() if k in ("categorical", "id")}
        frame = pd.read_csv(path, dtype=dtypes)
        return cls(frame, kinds, side.get("meta", {}))


@dataclass(frozen=True)
class ModelSpec:
    model: str
    label: str
    outcome: str
    regressors: tuple
    controls: tuple = HOUSEHOLD_CONTROLS
    fixed_effect: bool = True
    village_characteristics: bool = False
    cluster: str = "village_id"

    def __post_init__(self):
        if self.fixed_effect and self.village_characteristics:
            raise ValueError("village fixed effects and village characteristics are alternative variants")

    @property
    def variant(self) -> str:
        if self.fixed_effect:
            return "fe"
        return "village" if self.village_characteristics else "pooled"

    @property
    def all_controls(self) -> tuple:
        return self.controls + (VILLAGE_CONTROLS if self.village_characteristics else ())


# model id -> (label, focal regressors); the reference category of each
# split is the omitted one.
MODEL_REGRESSORS = {
    "1": ("Linktype (ref: non-receiver)", ("linktype_reciprocal", "linktype_unidirectional")),
    "2": ("Degrees", ("degree_reciprocal", "degree_unidirectional")),
    "3": ("Concentration index", ("concentration_z", "degree_reciprocal")),
    "4": ("Weighted concentration index", ("weighted_z", "degree_reciprocal")),
    "5": ("Client status (ref: non-client)", ("client", "degree_reciprocal")),
    "6": (
        "Unidirectional receipt and client status (ref: no unidirectional link)",
        ("unidirectional_not_client", "client", "degree_reciprocal"),
    ),
    "7": (
        "Political patron (ref: non-client)",
        ("client_political_patron", "client_nonpolitical_patron", "degree_reciprocal"),
    ),
    "8": (
        "Business patron (ref: non-client)",
        ("client_business_patron", "client_nonbusiness_patron", "degree_reciprocal"),
    ),
    "9": (
        "Pradhan caste (ref: non-client)",
        ("client_pradhan_same_caste", "client_pradhan_diff_caste", "degree_reciprocal"),
    ),
}


def build_model_suite(outcomes: Sequence[str] = OUTCOMES, variants=("fe", "village")) -> list:
    specs = []
    for outcome in outcomes:
        for model, (label, regs) in MODEL_REGRESSORS.items():
            for variant in variants:
                specs.append(
                    ModelSpec(
                        model=model,
                        label=label,
                        outcome=outcome,
                        regressors=regs,
                        fixed_effect=variant == "fe",
                        village_characteristics=variant == "village",
                    )
                )
    return specs


def within_demean(data: pd.DataFrame, group: str, columns: Iterable[str] | None = None) -> tuple:
    """
    Subtract group means from each column.

    Returns ``(demeaned, means)`` where ``means`` is indexed by group.
    """
    if group not in data:
        raise KeyError(f"group column {group!r} not in data")
    if len(data) == 0:
        raise ValueError("cannot demean an empty frame")
    if columns is None:
        columns = [c for c in data.columns if c != group and pd.api.types.is_numeric_dtype(data[c])]
    columns = list(columns)
    means = data.groupby(group, sort=True)[columns].mean()
    demeaned = data[columns] - means.loc[data[group]].to_numpy()
    return demeaned, means


def _expand(frame: pd.DataFrame, columns, kinds: dict) -> pd.DataFrame:
    parts = []
    for col in columns:
        if kinds.get(col) == "categorical":
            cats = sorted(frame[col].astype(str).unique())
            for cat in cats[1:]:
                parts.append((f"{col}[{cat}]", (frame[col].astype(str) == cat).astype(float)))
        else:
            parts.append((col, frame[col].astype(float)))
    return pd.DataFrame(dict(parts), index=frame.index)


def design(data: Dataset, spec: ModelSpec) -> tuple:
    """Return ``(y, X, clusters)`` with fixed effects already absorbed when requested."""
    frame = data.frame
    X = _expand(frame, spec.regressors + spec.all_controls, data.kinds)
    y = frame[spec.outcome].astype(float)
    if spec.fixed_effect:
        both = X.assign(__y=y, __g=frame["village_id"].to_numpy())
        dm, _ = within_demean(both, "__g", list(X.columns) + ["__y"])
        y = dm.pop("__y")
        X = dm
    else:
        X.insert(0, "const", 1.0)
    return y.to_numpy(), X, frame[spec.cluster].to_numpy()


def collinear_columns(X: np.ndarray, names: Sequence[str], rtol: float = 1e-10) -> list:
    """Columns lying in the span of the columns before them, in order."""
    basis = np.empty((X.shape[0], 0))
    scale = max(1.0, float(np.abs(X).max(initial=0.0)))
    bad = []
    for j, name in enumerate(names):
        v = X[:, j]
        r = v - basis @ (basis.T @ v) if basis.shape[1] else v.copy()
        if basis.shape[1]:
            r = r - basis @ (basis.T @ r)  # second pass for orthogonality
        norm = np.linalg.norm(r)
        if norm <= rtol * scale * np.sqrt(X.shape[0]):
            bad.append(name)
        else:
            basis = np.column_stack([basis, r / norm])
    return bad


@dataclass(frozen=True)
class FitResult:
    names: tuple
    params: np.ndarray
    cov: np.ndarray
    nobs: int
    n_clusters: int
    df_resid: int
    model: str = ""
    variant: str = ""
    outcome: str = ""

    @property
    def bse(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.cov), 0, None))

    @property
    def tvalues(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.params / self.bse

    @property
    def pvalues(self) -> np.ndarray:
        """Two-sided, Student t with ``G - 1`` degrees of freedom."""
        return 2 * stats.t.sf(np.abs(self.tvalues), self.df_resid)

    def coef(self, name: str) -> float:
        return float(self.params[self.names.index(name)])

    def se(self, name: str) -> float:
        return float(self.bse[self.names.index(name)])

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "variant": self.variant,
            "outcome": self.outcome,
            "coef": {
                n: {"est": float(b), "se": float(s)} for n, b, s in zip(self.names, self.params, self.bse)
            },
            "N": self.nobs,
            "G": self.n_clusters,
        }


def cluster_robust_fit(y, X, clusters, names=None) -> FitResult:
    """
    Least squares with CR1 cluster-robust covariance
    ``G/(G-1) * (N-1)/(N-K) * B M B`` where ``B = (X'X)^-1`` and ``M`` sums
    outer products of per-cluster scores.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be N x K and y length N")
    nobs, k = X.shape
    names = tuple(names) if names is not None else tuple(f"x{j}" for j in range(k))
    codes, uniq = pd.factorize(pd.Series(np.asarray(clusters)), sort=True)
    g = len(uniq)
    if g < 2:
        raise ValueError(f"need at least 2 clusters, got {g}")
    bad = collinear_columns(X, names)
    if bad:
        raise RankDeficiencyError(bad)
    if nobs <= k:
        raise ValueError(f"need more observations ({nobs}) than coefficients ({k})")

    params, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ params
    r = linalg.qr(X, mode="r")[0][:k]
    rinv = linalg.solve_triangular(r, np.eye(k))
    bread = rinv @ rinv.T
    scores = np.zeros((g, k))
    np.add.at(scores, codes, X * resid[:, None])
    meat = scores.T @ scores
    factor = g / (g - 1) * (nobs - 1) / (nobs - k)
    cov = factor * bread @ meat @ bread
    cov = (cov + cov.T) / 2
    return FitResult(names, params, cov, nobs, g, g - 1)


def ols_cluster_fit(data: Dataset, spec: ModelSpec) -> FitResult:
    y, X, clusters = design(data, spec)
    fit = cluster_robust_fit(y, X.to_numpy(), clusters, X.columns)
    return FitResult(
        fit.names, fit.params, fit.cov, fit.nobs, fit.n_clusters, fit.df_resid,
        model=spec.model, variant=spec.variant, outcome=spec.outcome,
    )


def regression_sample(data: Dataset, outcome: str, min_participants: int = 5, states=None) -> Dataset:
    """
    Drop patron households and villages with fewer than ``min_participants``
    households reporting MGNREGS work (ever, or in the last year for days).
    """
    f = data.frame
    if "is_patron" in f:
        f = f[f["is_patron"] == 0]
    if states is not None:
        f = f[f["state"].isin(states)]
    worked = f["participation"] > 0 if outcome == "participation" else f["days_worked"] > 0
    counts = worked.groupby(f["village_id"]).sum()
    keep = counts.index[counts >= min_participants]
    f = f[f["village_id"].isin(keep)].reset_index(drop=True)
    return Dataset(f, data.kinds, dict(data.meta))


def run_suite(data: Dataset, specs: Iterable[ModelSpec] | None = None, min_participants: int = 5) -> list:
    """Fit each spec on its outcome's regression sample."""
    specs = build_model_suite() if specs is None else list(specs)
    samples = {}
    fits = []
    for spec in specs:
        if spec.outcome not in samples:
            samples[spec.outcome] = regression_sample(data, spec.outcome, min_participants)
        fits.append(ols_cluster_fit(samples[spec.outcome], spec))
    return fits


def suite_table(fits: Iterable[FitResult]) -> pd.DataFrame:
    """One row per (outcome, model, variant) with the focal coefficients and SEs."""
    rows = []
    for fit in fits:
        focal = MODEL_REGRESSORS[fit.model][1]
        row = {"outcome": fit.outcome, "model": fit.model, "variant": fit.variant, "N": fit.nobs, "G": fit.n_clusters}
        for name in focal:
            row[f"{name}"] = fit.coef(name)
            row[f"{name}_se"] = fit.se(name)
        rows.append(row)
    return pd.DataFrame(rows)
