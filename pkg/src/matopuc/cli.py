"""Command-line driver.

Every subcommand builds a density, runs one computation, checks at least one
identity and writes a JSON report. Exit codes: 0 ok, 2 bad input, 3 numerical
failure, 4 identity violated.
"""

import argparse
from dataclasses import dataclass
from importlib import resources
import json
import os
import sys

import numpy as np

from . import __version__
from .block_toeplitz import assemble, block_flip, kolmogorov_factor, schur_pair
from .cd_kernels import cd_check
from .errors import IdentityViolation, NotContractionError, OpucError
from .io import SCHEMA_VERSION, dumps, matrix_from_dict, matrix_to_dict, polynomial_to_dict, verblunsky_to_list
from .linalg import adjoint, as_matrix, hermitian_sqrt
from .opuc import build_chain
from .spectral_measure import (
    ALIAS_FACTOR, DEFAULT_GRID_SIZE, DensitySpec, SpectralDensity, bernstein_szego_density,
    builtin_density, inner_product_left, inner_product_right, moments_from_density,
)
from .szego_limit import DEFAULT_N_MAX, DEFAULT_TOL, limit_report

EXIT_OK, EXIT_PARSE, EXIT_NUMERICAL, EXIT_IDENTITY = 0, 2, 3, 4
COMMANDS = ("moments", "opuc", "verblunsky", "cd-check", "bernstein", "szego", "kolmogorov")
GRID_ENV = "OPUC_GRID_SIZE"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    density: str
    dim: int | None = None
    file: str | None = None
    order: int = 4
    grid: int = DEFAULT_GRID_SIZE
    tol: float | None = None
    seed: int | None = None
    output: str | None = None
    normalize: bool | None = None
    n_max: int = DEFAULT_N_MAX
    pairs: int = 50
    series: str | None = None
    dump_toeplitz: str | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.order < 0 or self.n_max < 1:
            raise ConfigError("order must be >= 0 and n-max >= 1")
        top = self.n_max if self.command == "szego" else self.order
        if self.grid < ALIAS_FACTOR * (top + 1):
            raise ConfigError(f"grid {self.grid} too coarse for order {top}: "
                              f"need at least {ALIAS_FACTOR * (top + 1)}")
        return self

    @property
    def tolerance(self):
        if self.tol is not None:
            return self.tol
        return DEFAULT_TOL if self.command == "szego" else 1e-8


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _builtin_trig():
    text = resources.files("matopuc").joinpath("data/smooth_trig.json").read_text()
    return json.loads(text)


def _alpha_list(obj):
    if isinstance(obj, dict):
        obj = obj.get("alphas", obj)
    if not isinstance(obj, list) or not obj:
        raise ConfigError("alpha list must be a non-empty JSON list")
    out = []
    for a in obj:
        if isinstance(a, dict):
            out.append(matrix_from_dict(a))
        else:
            out.append(as_matrix(np.array(a, dtype=complex)))
    return out


def parse_density_spec(text, dim=None, file=None, seed=None):
    """Parse the ``--density`` grammar into a :class:`DensitySpec`.

    ``lebesgue`` | ``trig[:<path>|:builtin]`` | ``random:d=..,m=..,seed=..,eps=..``
    | ``bs:[...]`` | ``bs:<path>`` | ``json:<path>`` (a spec object).
    """
    family, _, arg = text.partition(":")
    family = family.strip()
    if family == "lebesgue":
        return DensitySpec.lebesgue(int(dim or 1))
    if family in ("trig", "trig_poly"):
        path = arg or file
        obj = _builtin_trig() if path in (None, "", "builtin") else _load_json(path)
        if isinstance(obj, list):
            obj = {"coefficients": obj}
        obj.setdefault("family", "trig_poly")
        obj.pop("label", None)
        return DensitySpec.from_dict(obj)
    if family in ("random", "random_pd"):
        fields = {}
        for item in filter(None, arg.split(",")):
            key, eq, val = item.partition("=")
            if not eq:
                raise ConfigError(f"malformed random field {item!r}")
            fields[key.strip()] = val.strip()
        s = fields.get("seed", seed)
        if s is None:
            raise ConfigError("random density needs a seed (seed=... or --seed)")
        try:
            d = int(fields.get("d", dim or 1))
            m = int(fields.get("m", 3))
            eps = float(fields.get("eps", 0.1))
            s = int(s)
        except ValueError as exc:
            raise ConfigError(f"malformed random density {text!r}: {exc}") from exc
        return DensitySpec.random_pd(d, m, s, eps)
    if family in ("bs", "bs_from_alphas"):
        arg = arg.strip()
        if arg.startswith("["):
            try:
                obj = json.loads(arg)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"malformed alpha list {arg!r}") from exc
        else:
            obj = _load_json(arg or file)
        alphas = _alpha_list(obj)
        for k, a in enumerate(alphas):
            if np.linalg.norm(a, 2) >= 1:
                raise NotContractionError(f"alpha_{k} is not a strict contraction")
        return DensitySpec.bs_from_alphas(alphas)
    if family == "json":
        obj = dict(_load_json(arg or file))
        obj.pop("label", None)
        try:
            return DensitySpec.from_dict(obj)
        except KeyError as exc:
            raise ConfigError(f"density spec is missing {exc}") from exc
    raise ConfigError(f"unknown density family {family!r}")


def resolve_density(cfg):
    """Parse-stage half of the density: a spec, or a density read from file."""
    if cfg.density.startswith("file:"):
        try:
            return SpectralDensity.from_dict(_load_json(cfg.density[5:]))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"not an exported density: {exc}") from exc
    return parse_density_spec(cfg.density, cfg.dim, cfg.file, cfg.seed)


def _sample(source, cfg):
    if isinstance(source, SpectralDensity):
        return source
    return builtin_density(source, cfg.grid)


class Checks:
    def __init__(self, tol):
        self.tol = tol
        self.items = []

    def add(self, name, residual, tol=None, relative_to=None):
        tol = self.tol if tol is None else tol
        bound = tol * max(1.0, relative_to) if relative_to is not None else tol
        self.items.append({"identity": name, "residual": float(residual), "tol": float(bound)})
        if not residual <= bound:
            raise IdentityViolation(name, float(residual), bound)


def _maxabs(a):
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def cmd_moments(cfg, w, checks):
    mu = moments_from_density(w, cfg.order)
    n = cfg.order + 1
    tr, tl = assemble(mu, n, "R"), assemble(mu, n, "L")
    flip = block_flip(n, mu.dim)
    checks.add("T^R == L T^L L", _maxabs(tr.dense - flip @ tl.dense @ flip))
    checks.add("T^R Hermitian", _maxabs(tr.dense - adjoint(tr.dense)))
    return {
        "order": cfg.order,
        "moments": [{"j": j, "mu": matrix_to_dict(mu[j])} for j in range(cfg.order + 1)],
        "toeplitz_condition": tr.condition,
    }


def cmd_opuc(cfg, w, checks):
    mu = moments_from_density(w, cfg.order)
    chain = build_chain(mu, cfg.order, tol=cfg.tolerance)
    worst_r = worst_l = 0.0
    for k in range(cfg.order + 1):
        for j in range(cfg.order + 1):
            expect_r = chain.schur[k].kappaR if k == j else 0
            expect_l = chain.schur[k].kappaL if k == j else 0
            worst_r = max(worst_r, _maxabs(inner_product_right(chain.monicR[k], chain.monicR[j], mu) - expect_r))
            worst_l = max(worst_l, _maxabs(inner_product_left(chain.monicL[k], chain.monicL[j], mu) - expect_l))
    scale = _maxabs(mu[0])
    checks.add("<<Phi_k^R, Phi_j^R>>_R == delta_kj kappa_k^R", worst_r, relative_to=scale)
    checks.add("<<Phi_k^L, Phi_j^L>>_L == delta_kj kappa_k^L", worst_l, relative_to=scale)
    return {
        "order": cfg.order,
        "alphas": [matrix_to_dict(a) for a in chain.alphas],
        "kappaR": [matrix_to_dict(s.kappaR) for s in chain.schur],
        "kappaL": [matrix_to_dict(s.kappaL) for s in chain.schur],
        "monicR": [polynomial_to_dict(p) for p in chain.monicR],
        "monicL": [polynomial_to_dict(p) for p in chain.monicL],
        "phiR": [polynomial_to_dict(p) for p in chain.normR],
        "phiL": [polynomial_to_dict(p) for p in chain.normL],
    }


def kappa_product_residual(chain, n):
    """``kappa_n = P P^H`` with ``P = mu_0^{1/2} rho_0 ... rho_{n-1}``, both sides."""
    root0 = hermitian_sqrt(chain.mu[0])
    pr, pl = root0.copy(), root0.copy()
    for v in chain.verblunsky[:n]:
        pr, pl = pr @ v.rhoR, pl @ v.rhoL
    return max(_maxabs(pr @ adjoint(pr) - chain.schur[n].kappaR),
               _maxabs(pl @ adjoint(pl) - chain.schur[n].kappaL))


def cmd_verblunsky(cfg, w, checks):
    mu = moments_from_density(w, cfg.order)
    chain = build_chain(mu, cfg.order, tol=cfg.tolerance)
    # build_chain already enforces these; recording the residuals makes them visible
    lr = rho = 0.0
    for n, v in enumerate(chain.verblunsky):
        nr, ml = chain.rootR[n], chain.rootL[n]
        alpha_l = -np.linalg.inv(nr) @ adjoint(chain.monicL[n + 1].coeffs[0]) @ adjoint(ml)
        lr = max(lr, _maxabs(v.alpha - alpha_l))
        ratio = adjoint(nr) @ chain.schur[n + 1].kappaR @ nr
        rho = max(rho, _maxabs(hermitian_sqrt(ratio) - v.rhoR))
    checks.add("alpha_n^R == alpha_n^L", lr)
    checks.add("(N_n^H kappa_{n+1}^R N_n)^(1/2) == (I - alpha_n alpha_n^H)^(1/2)", rho)
    worst = max((kappa_product_residual(chain, n) for n in range(cfg.order + 1)), default=0.0)
    checks.add("kappa_n == (mu0^(1/2) rho_0...rho_{n-1})(...)^H", worst, relative_to=_maxabs(mu[0]))
    return {
        "order": cfg.order,
        "verblunsky": verblunsky_to_list(chain.verblunsky),
        "alpha_norms": [float(np.linalg.norm(a, 2)) for a in chain.alphas],
    }


def cmd_cd_check(cfg, w, checks):
    mu = moments_from_density(w, cfg.order)
    chain = build_chain(mu, cfg.order, tol=cfg.tolerance)
    rng = np.random.default_rng(cfg.seed if cfg.seed is not None else 0)
    angles = rng.uniform(0, 2 * np.pi, size=(cfg.pairs, 2))
    pairs = [(complex(np.exp(1j * a)), complex(np.exp(1j * b))) for a, b in angles]
    rows, summary = cd_check(chain, pairs)
    for key, stats in summary.items():
        checks.add(f"CD kernel routes agree ({key})", stats["max"])
    return {"order": cfg.order, "pairs": len(pairs), "summary": summary, "residuals": rows}


def cmd_bernstein(cfg, w, checks):
    n = cfg.order
    extra = max(4, n)
    mu = moments_from_density(w, n + extra)
    chain = build_chain(mu, n + extra, tol=cfg.tolerance)
    bs = bernstein_szego_density(chain.normR[n], w.grid_size)
    mu_bs = moments_from_density(bs, n + extra)
    chain_bs = build_chain(mu_bs, n + extra, tol=cfg.tolerance)
    mom = max(_maxabs(mu[j] - mu_bs[j]) for j in range(n + 1))
    checks.add("mu_j(dmu^(n)) == mu_j(dmu), |j| <= n", mom, tol=max(cfg.tolerance, 1e-7))
    kept = max((_maxabs(a - b) for a, b in zip(chain.alphas[:n], chain_bs.alphas[:n])), default=0.0)
    zeros = max(_maxabs(a) for a in chain_bs.alphas[n:])
    checks.add("alpha_j(dmu^(n)) == alpha_j(dmu), j < n", kept, tol=max(cfg.tolerance, 1e-7))
    checks.add("alpha_j(dmu^(n)) == 0, j >= n", zeros, tol=max(cfg.tolerance, 1e-7))
    return {
        "order": n,
        "alphas_original": [matrix_to_dict(a) for a in chain.alphas],
        "alphas_bernstein_szego": [matrix_to_dict(a) for a in chain_bs.alphas],
        "moments_bernstein_szego": [matrix_to_dict(mu_bs[j]) for j in range(n + 1)],
    }


def cmd_szego(cfg, w, checks):
    normalize = True if cfg.normalize is None else cfg.normalize
    report = limit_report(w, cfg.n_max, cfg.tolerance, normalize=normalize)
    ratios = np.array(report.det_ratios)
    prods = np.array(report.partial_products)
    checks.add("det T_n / det T_{n-1} == det mu_0 prod_{k<n-1} det(I - alpha_k alpha_k^H)",
               float(np.max(np.abs(ratios - prods) / np.abs(prods))), tol=1e-8)
    if normalize:
        checks.add("det_2 ratio == det ratio when mu_0 = I",
                   float(np.max(np.abs(np.array(report.det2_ratios) - ratios) / ratios)), tol=1e-8)
    if cfg.series:
        with open(cfg.series, "w") as fh:
            fh.write("# n det_ratio\n")
            for n, r in zip(report.n_values, report.det_ratios):
                fh.write(f"{n} {r!r}\n")
    return report.to_dict()


def cmd_kolmogorov(cfg, w, checks):
    n = max(cfg.order, 1)
    mu = moments_from_density(w, n - 1)
    t = assemble(mu, n, "R")
    vs = kolmogorov_factor(t)
    worst = max(_maxabs(adjoint(vs[i]) @ vs[j] - t.block(i, j)) for i in range(n) for j in range(n))
    checks.add("C_ij == V_i^H V_j", worst, relative_to=_maxabs(mu[0]))
    return {"blocks": n, "V": [matrix_to_dict(v) for v in vs], "max_block_error": worst}


HANDLERS = {
    "moments": cmd_moments, "opuc": cmd_opuc, "verblunsky": cmd_verblunsky,
    "cd-check": cmd_cd_check, "bernstein": cmd_bernstein, "szego": cmd_szego,
    "kolmogorov": cmd_kolmogorov,
}


def dump_toeplitz(path, w, n):
    mu = moments_from_density(w, n)
    tr, tl = assemble(mu, n + 1, "R"), assemble(mu, n + 1, "L")
    sd = schur_pair(mu, n)
    obj = {
        "schema_version": SCHEMA_VERSION,
        "n": n,
        "TR": matrix_to_dict(tr.dense),
        "TL": matrix_to_dict(tl.dense),
        "kappaR": matrix_to_dict(sd.kappaR),
        "kappaL": matrix_to_dict(sd.kappaL),
    }
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def run(cfg, source=None):
    """Execute one configured command; returns ``(exit_code, report_dict)``.

    ``source`` is the output of :func:`resolve_density`; it is computed from
    ``cfg`` when omitted. Numerical failures propagate as exceptions.
    """
    cfg.validate()
    if source is None:
        source = resolve_density(cfg)
    w = _sample(source, cfg)
    normalize = cfg.normalize if cfg.command != "szego" else False
    if normalize:
        w = w.normalized()
    checks = Checks(cfg.tolerance)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": f"matopuc {__version__}",
        "command": cfg.command,
        "config": {
            "density": cfg.density, "dim": w.dim, "order": cfg.order, "grid": cfg.grid,
            "tol": cfg.tolerance, "seed": cfg.seed, "normalize": cfg.normalize,
        },
        "density": {"label": w.label, "dim": w.dim, "grid_size": w.grid_size,
                    "sha256": w.fingerprint()},
    }
    if cfg.command == "szego":
        report["config"]["n_max"] = cfg.n_max
    status = EXIT_OK
    try:
        report["result"] = HANDLERS[cfg.command](cfg, w, checks)
    except IdentityViolation as exc:
        report["error"] = {"kind": "identity_violation", "identity": exc.name,
                           "residual": exc.residual, "tol": exc.tol}
        status = EXIT_IDENTITY
    report["checks"] = checks.items
    if cfg.dump_toeplitz:
        dump_toeplitz(cfg.dump_toeplitz, w, cfg.order)
    return status, report


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--density", required=True,
                        help="lebesgue | trig[:PATH] | random:d=,m=,seed=,eps= | bs:[...] | bs:PATH "
                             "| json:PATH | file:PATH (exported density)")
    common.add_argument("--dim", type=int, help="matrix dimension for lebesgue/random")
    common.add_argument("--file", help="data file for trig/bs densities")
    common.add_argument("--order", type=int, default=4, help="polynomial degree / Toeplitz order")
    common.add_argument("--grid", type=int, help=f"grid size (default ${GRID_ENV} or {DEFAULT_GRID_SIZE})")
    common.add_argument("--tol", type=float, help="identity tolerance (default 1e-8; szego: 1e-6)")
    common.add_argument("--seed", type=int, help="seed for random densities and sample points")
    common.add_argument("--output", "-o", help="report path (default stdout)")
    common.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=None,
                        help="rescale the density so that mu_0 = I")
    common.add_argument("--dump-toeplitz", metavar="PATH",
                        help="also write T_n^R, T_n^L, kappa_n^R, kappa_n^L as JSON")

    parser = argparse.ArgumentParser(prog="matopuc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "szego":
            p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
            p.add_argument("--series", metavar="PATH", help="write a two-column (n, ratio) file")
        if name == "cd-check":
            p.add_argument("--pairs", type=int, default=50, help="number of random (w, z) pairs")
    return parser


def config_from_args(ns):
    grid = ns.grid
    if grid is None:
        env = os.environ.get(GRID_ENV)
        try:
            grid = int(env) if env else DEFAULT_GRID_SIZE
        except ValueError as exc:
            raise ConfigError(f"{GRID_ENV} must be an integer, got {env!r}") from exc
    cfg = RunConfig(
        command=ns.command, density=ns.density, dim=ns.dim, file=ns.file, order=ns.order,
        grid=grid, tol=ns.tol, seed=ns.seed, output=ns.output, normalize=ns.normalize,
        n_max=getattr(ns, "n_max", DEFAULT_N_MAX), pairs=getattr(ns, "pairs", 50),
        series=getattr(ns, "series", None), dump_toeplitz=ns.dump_toeplitz,
    )
    return cfg.validate()


def main(argv=None):
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        source = resolve_density(cfg)
    except (ConfigError, NotContractionError, ValueError) as exc:
        print(f"matopuc: bad input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        status, report = run(cfg, source)
    except OpucError as exc:
        print(f"matopuc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = dumps(report)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if status == EXIT_IDENTITY:
        err = report["error"]
        print(f"matopuc: identity violated: {err['identity']} "
              f"(residual {err['residual']:.3e} > {err['tol']:.1e})", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
