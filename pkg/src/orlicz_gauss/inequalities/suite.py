"""Run every check over a function catalog."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from ..gauss_space import GaussFunction, GaussQuadrature, HermiteExpansion, SchemaError, function_from_json
from ..gauss_space import parse_quadrature
from ..young import parse_convex, parse_young
from .checks import (
    NORM_PAIRS,
    chi2_bound_check,
    cosh_gauss2_bound_check,
    covariance_bound_check,
    first_version_check,
    gauss_poincare_check,
    lipschitz_constant,
    lipschitz_subexp_check,
    llogl_bound_check,
    lp_bound_check,
    mgf_bound_check,
    ou_selfadjoint_check,
)
from .report import InequalityReport, InequalityRow

THREADS_ENV = "ORLICZ_GAUSS_THREADS"


@dataclass
class CatalogEntry:
    id: str
    function: GaussFunction
    source: dict


@dataclass
class Catalog:
    functions: List[CatalogEntry] = field(default_factory=list)
    densities: List[CatalogEntry] = field(default_factory=list)
    pairs: List[Tuple[str, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.functions) + len(self.densities)

    def get(self, fid: str) -> CatalogEntry:
        for e in self.functions:
            if e.id == fid:
                return e
        raise KeyError(fid)


def _entries(obj: dict, key: str) -> List[CatalogEntry]:
    items = obj.get(key, [])
    if not isinstance(items, list):
        raise SchemaError(key, "expected a list")
    out, seen = [], set()
    for k, item in enumerate(items):
        where = f"{key}[{k}]"
        if not isinstance(item, dict) or not isinstance(item.get("id"), str):
            raise SchemaError(f"{where}.id", "expected an object with a string id")
        if item["id"] in seen:
            raise SchemaError(f"{where}.id", f"duplicate id {item['id']!r}")
        seen.add(item["id"])
        out.append(CatalogEntry(item["id"], function_from_json(item.get("function"), f"{where}.function"),
                                item["function"]))
    return out


def load_catalog(obj) -> Catalog:
    """Build a catalog from its JSON form::

        {"functions": [{"id": ..., "function": <function JSON>}, ...],
         "densities": [{"id": ..., "function": <function JSON>}, ...],
         "pairs": [{"f": id, "g": id}, ...]}
    """
    if not isinstance(obj, dict):
        raise SchemaError("catalog", "expected an object")
    cat = Catalog(_entries(obj, "functions"), _entries(obj, "densities"))
    ids = {e.id: e for e in cat.functions}
    for k, pr in enumerate(obj.get("pairs", [])):
        if not isinstance(pr, dict):
            raise SchemaError(f"pairs[{k}]", "expected {f, g} naming catalog functions")
        for key in ("f", "g"):
            if pr.get(key) not in ids:
                raise SchemaError(f"pairs[{k}].{key}", f"unknown function id {pr.get(key)!r}")
        if ids[pr["f"]].function.dim != ids[pr["g"]].function.dim:
            raise SchemaError(f"pairs[{k}]", "functions of different dimension")
        cat.pairs.append((pr["f"], pr["g"]))
    return cat


@dataclass
class SuiteConfig:
    quad: object = "gh:64"
    tol: float = 1e-10
    first_version_phis: Tuple[str, ...] = ("raw-power:2", "exp2*", "cosh-1")
    mgf_kappas: Tuple[float, ...] = (0.5, 0.9)
    lp_ps: Tuple[float, ...] = (1.0, 2.0, 3.0)
    covariance_phi: str = "cosh-1"
    norm_pairs: Tuple[str, ...] = ("l2-l2", "l1-linf")
    threads: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "quad": self.quad if isinstance(self.quad, (str, dict)) else self.quad.spec(),
            "tol": self.tol,
            "first_version_phis": list(self.first_version_phis),
            "mgf_kappas": list(self.mgf_kappas),
            "lp_ps": list(self.lp_ps),
            "covariance_phi": self.covariance_phi,
            "norm_pairs": list(self.norm_pairs),
        }


def thread_count(requested: Optional[int] = None) -> int:
    """Worker count: ``requested`` or 1, capped by ``ORLICZ_GAUSS_THREADS``."""
    n = requested or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            n = min(n, max(1, int(cap))) if requested else max(1, int(cap))
        except ValueError:
            pass
    return max(1, n)


Task = Tuple[str, str, str, dict, Callable[[], InequalityRow]]


def _guard(task: Task) -> InequalityRow:
    name, fid, phi, params, fn = task
    try:
        row = fn()
    except Exception as exc:  # a single row never aborts the suite
        return InequalityRow.failure(name, fid, phi, exc, params)
    row.params = {**params, **row.params}
    return row


def _sort_key(row: InequalityRow):
    return row.name, row.function_id, row.phi_name, json.dumps(row.params, sort_keys=True, default=str)


def build_tasks(catalog: Catalog, config: SuiteConfig, rule_for: Callable[[int], GaussQuadrature]) -> List[Task]:
    tasks: List[Task] = []
    phis = [parse_convex(s) for s in config.first_version_phis]
    cov_phi = parse_young(config.covariance_phi)
    for e in catalog.functions:
        f, fid, rule = e.function, e.id, rule_for(e.function.dim)
        tasks.append(("gauss_poincare", fid, "raw-power:2", {}, lambda f=f, r=rule, i=fid: gauss_poincare_check(f, r, i)))
        for phi in phis:
            tasks.append(("first_version", fid, phi.name, {},
                          lambda f=f, r=rule, i=fid, p=phi: first_version_check(f, p, r, function_id=i)))
        for k in config.mgf_kappas:
            tasks.append(("mgf", fid, "exp", {"kappa": k}, lambda f=f, r=rule, i=fid, k=k: mgf_bound_check(f, k, r, i)))
        for p in config.lp_ps:
            tasks.append(("lp", fid, f"raw-power:{2 * p:g}", {"p": p},
                          lambda f=f, r=rule, i=fid, p=p: lp_bound_check(f, p, r, i)))
        tasks.append(("llogl", fid, "exp2*", {}, lambda f=f, r=rule, i=fid: llogl_bound_check(f, r, i, config.tol)))
        tasks.append(("cosh_gauss2", fid, "cosh-1", {},
                      lambda f=f, r=rule, i=fid: cosh_gauss2_bound_check(f, r, i, config.tol)))
        try:
            lipschitz_constant(f)
        except ValueError:
            pass
        else:
            tasks.append(("lipschitz_subexp", fid, "cosh-1", {},
                          lambda f=f, r=rule, i=fid: lipschitz_subexp_check(f, r, i, config.tol)))

    pairs = [(e.id, e.id) for e in catalog.functions] + [p for p in catalog.pairs if p[0] != p[1]]
    for a, b in pairs:
        f, g = catalog.get(a).function, catalog.get(b).function
        rule, pid = rule_for(f.dim), f"{a}|{b}"
        for pn in config.norm_pairs:
            n1, n2 = NORM_PAIRS[pn]
            tasks.append(("covariance", pid, cov_phi.name, {"norm_pair": pn},
                          lambda f=f, g=g, r=rule, i=pid, n1=n1, n2=n2: covariance_bound_check(
                              f, g, cov_phi, n1, n2, r, i, config.tol)))
        if isinstance(f, HermiteExpansion) and isinstance(g, HermiteExpansion):
            tasks.append(("ou_selfadjoint", pid, "-", {}, lambda f=f, g=g, r=rule, i=pid: ou_selfadjoint_check(f, g, r, i)))

    for e in catalog.densities:
        rule = rule_for(e.function.dim)
        tasks.append(("chi2", e.id, "raw-power:2", {}, lambda p=e.function, r=rule, i=e.id: chi2_bound_check(p, r, i)))
    return tasks


def run_suite(catalog: Catalog, config: Optional[SuiteConfig] = None) -> InequalityReport:
    """All checks over the catalog; rows sorted by (check, function id)."""
    config = config or SuiteConfig()
    if isinstance(config.quad, GaussQuadrature):
        fixed = config.quad
        rule_for = lambda dim: fixed if fixed.dim == dim else parse_quadrature(fixed.spec(), dim)  # noqa: E731
    else:
        cache: Dict[int, GaussQuadrature] = {}

        def rule_for(dim: int) -> GaussQuadrature:
            if dim not in cache:
                cache[dim] = parse_quadrature(config.quad, dim)
            return cache[dim]

        for dim in sorted({e.function.dim for e in catalog.functions + catalog.densities}):
            rule_for(dim)
    tasks = build_tasks(catalog, config, rule_for)
    workers = thread_count(config.threads)
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_guard, tasks))
    else:
        rows = [_guard(t) for t in tasks]
    rows.sort(key=_sort_key)
    return InequalityReport(rows)


__all__ = ["Catalog", "CatalogEntry", "SuiteConfig", "load_catalog", "run_suite", "thread_count"]
