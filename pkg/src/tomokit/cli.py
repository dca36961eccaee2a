"""Command-line front end.

    tomokit check-set SET.json
    tomokit reconstruct --scheme {finite,spin,photon,symplectic} TOMOGRAM.json [--reference REF.json]
    tomokit verify {identity-finite,identity-spinhalf,identity-spinj,delta-symplectic}
    tomokit demo-pauli ALPHA_RE ALPHA_IM BETA
    tomokit generate --scheme SCHEME --state STATE --out TOMOGRAM.json

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
Set TOMOKIT_LOG=DEBUG (or INFO, WARNING) for log output on stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import fock_tomography as fock
from . import io
from . import spin_tomography as spin
from . import symplectic_tomography as sym
from .operator_space import fidelity, hermiticity_residual, random_density_matrix
from .tomographic_sets import (
    RankDeficientError,
    gram_schmidt,
    identity_check,
    is_minimal_tomographic_set,
    random_minimal_set,
    reconstruct,
    tomogram,
)

log = logging.getLogger("tomokit")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
THRESHOLDS = {
    "identity-finite": 1e-8,
    "identity-spinhalf": 1e-8,
    "identity-spinj": 1e-6,
    "delta-symplectic": 10.0,  # minimum peak ratio
}


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)  # path -> sha256
    metrics: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    status: str = "ok"
    details: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, default=_jsonable)

    def text(self) -> str:
        lines = [f"{self.command}: {self.status}"]
        lines += [f"  {k} = {v:.6g}" if isinstance(v, float) else f"  {k} = {v}" for k, v in self.metrics.items()]
        lines += [f"  {k}: {v}" for k, v in self.details.items()]
        lines += [f"  warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"not serializable: {type(x).__name__}")


class UsageError(Exception):
    pass


# -- subcommands ------------------------------------------------------------

def cmd_check_set(args) -> tuple[RunReport, int]:
    report = RunReport("check-set")
    doc, digest = io.load_json(args.set_file)
    report.inputs[args.set_file] = digest
    tset = io.set_from_json(doc)
    try:
        res = is_minimal_tomographic_set(tset)
    except ValueError as exc:
        report.metrics.update(rank=float("nan"), condition_number=float("inf"))
        report.details["minimal"] = False
        report.warnings.append(str(exc))
        return report, EXIT_FAIL
    report.metrics.update(rank=res.rank, condition_number=res.condition_number)
    report.details["minimal"] = res.minimal
    return report, EXIT_OK if res.minimal else EXIT_FAIL


def _reference_matrix(path, report, dim=None) -> np.ndarray:
    doc, digest = io.load_json(path)
    report.inputs[path] = digest
    m = io.matrix_from_json(doc).entries
    if dim is not None and m.shape[0] < dim:
        padded = np.zeros((dim, dim), dtype=complex)
        padded[: m.shape[0], : m.shape[0]] = m
        m = padded
    return m


def _matrix_metrics(report, rho, ref):
    report.metrics["hermiticity_residual"] = hermiticity_residual(rho)
    report.metrics["trace"] = float(np.trace(rho).real)
    if ref is not None:
        if ref.shape != rho.shape:
            raise UsageError(f"reference has dim {ref.shape[0]}, reconstruction has dim {rho.shape[0]}")
        report.metrics["fidelity"] = fidelity(rho, ref)
        report.metrics["max_abs_error"] = float(np.max(np.abs(rho - ref)))


def cmd_reconstruct(args) -> tuple[RunReport, int]:
    report = RunReport(f"reconstruct --scheme {args.scheme}")
    if args.scheme == "photon" and args.s is None:
        raise UsageError("the photon scheme needs --s (kernel parameter in (-1, 1))")
    doc, digest = io.load_json(args.tomogram_file)
    report.inputs[args.tomogram_file] = digest
    t0 = time.perf_counter()
    out_doc = None
    if args.scheme == "finite":
        tom = io.tomogram_from_json(doc)
        kernel = gram_schmidt(tom.set)
        rho = reconstruct(tom, kernel)
        ref = _reference_matrix(args.reference, report) if args.reference else None
        _matrix_metrics(report, rho, ref)
        out_doc = io.matrix_to_json(rho)
    elif args.scheme == "spin":
        grid = io.spin_from_json(doc)
        res = spin.spin_j_reconstruct(grid, threads=args.threads)
        report.warnings += res.warnings
        ref = _reference_matrix(args.reference, report) if args.reference else None
        _matrix_metrics(report, res.matrix, ref)
        out_doc = io.matrix_to_json(res.matrix)
    elif args.scheme == "photon":
        tom, nmax = io.photon_from_json(doc)
        nmax = args.nmax if args.nmax is not None else nmax
        res = fock.photon_reconstruct(tom, args.s, nmax=nmax, threads=args.threads)
        report.warnings += res.warnings
        report.metrics["number_truncation"] = res.number_truncation
        report.metrics["radial_truncation"] = res.radial_truncation
        ref = _reference_matrix(args.reference, report, nmax + 1) if args.reference else None
        if ref is not None:
            ref = ref[: nmax + 1, : nmax + 1]
        _matrix_metrics(report, res.matrix, ref)
        report.metrics["p0"] = float(res.matrix[0, 0].real)
        out_doc = io.matrix_to_json(res.matrix)
    else:
        tom, ygrid = io.symplectic_from_json(doc)
        if args.grid_q is not None:
            ygrid = sym.UniformGrid(-8.0, 8.0, args.grid_q)
        if ygrid is None:
            ygrid = sym.UniformGrid(-8.0, 8.0, sym.DEFAULT_Y_POINTS)
        res = sym.symplectic_reconstruct(tom, ygrid)
        report.metrics["hermiticity_residual"] = hermiticity_residual(res.matrix)
        report.metrics["trace"] = res.trace()
        if args.reference:
            rdoc, rdigest = io.load_json(args.reference)
            report.inputs[args.reference] = rdigest
            target = sym.density_on_grid(io.wavefunction_from_json(rdoc), ygrid)
            report.metrics["max_abs_error"] = float(np.max(np.abs(res.matrix - target)))
        out_doc = {"ygrid": {"lo": ygrid.lo, "hi": ygrid.hi, "npoints": ygrid.npoints},
                   **io.matrix_to_json(res.matrix)}
    report.metrics["runtime_s"] = time.perf_counter() - t0
    if args.out:
        io.dump_json(out_doc, args.out)
        report.details["output"] = args.out
    return report, EXIT_OK


def _spin_j(text: str) -> Fraction:
    try:
        j = Fraction(text)
    except ValueError:
        raise UsageError(f"--j must be an integer or half-integer, got {text!r}") from None
    if (2 * j).denominator != 1 or j < 0:
        raise UsageError(f"--j must be a non-negative integer or half-integer, got {text}")
    return j


def cmd_verify(args) -> tuple[RunReport, int]:
    report = RunReport(f"verify {args.target}")
    thr = THRESHOLDS[args.target]
    t0 = time.perf_counter()
    if args.target == "identity-finite":
        rng = np.random.default_rng(args.seed)
        tset = random_minimal_set(args.dim, rng)
        resid = identity_check(gram_schmidt(tset), tset)
        report.metrics["residual"] = resid
        ok = resid < thr
    elif args.target == "identity-spinhalf":
        quad = spin.SphereQuadrature.gauss(args.nodes_theta or 16, args.nodes_phi or args.nodes_theta or 16)
        report.metrics["kernel_residual"] = spin.kernel_identity_residual(quad)
        report.metrics["dual_residual"] = spin.dual_identity_check(quad)
        resid = max(report.metrics["kernel_residual"], report.metrics["dual_residual"])
        report.metrics["residual"] = resid
        ok = resid < thr
    elif args.target == "identity-spinj":
        j = _spin_j(args.j)
        default = 8 * int(2 * j + 1)
        nt = args.nodes_theta or default
        quad = spin.SphereQuadrature.gauss(nt, args.nodes_phi or nt)
        resid = spin.spin_j_identity_residual(j, quad)
        n = int(2 * j + 1)
        rho = random_density_matrix(n, rng=np.random.default_rng(args.seed))
        res = spin.spin_j_reconstruct(spin.spin_j_tomogram(rho, j, quad), threads=args.threads)
        report.warnings += res.warnings
        report.metrics["residual"] = resid
        report.metrics["round_trip_error"] = float(np.max(np.abs(res.matrix - rho)))
        ok = max(resid, report.metrics["round_trip_error"]) < thr
    else:
        ratio = sym.delta_peak_ratio(1.0, -0.5)
        report.metrics["peak_ratio"] = ratio
        report.metrics["peak_value"] = abs(sym.delta_identity_probe(1.0, -0.5, 1.0, -0.5))
        ok = ratio >= thr
    report.metrics["threshold"] = thr
    report.metrics["runtime_s"] = time.perf_counter() - t0
    if not ok:
        report.status = "error"
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_demo_pauli(args) -> tuple[RunReport, int]:
    if args.alpha_re <= 0:
        raise UsageError("alpha_re must be positive")
    report = RunReport("demo-pauli")
    alpha = complex(args.alpha_re, args.alpha_im)
    res = sym.pauli_counterexample(alpha, args.beta)
    report.metrics.update(marginal_gap_q=res.marginal_gap_q, marginal_gap_p=res.marginal_gap_p,
                          fidelity=res.fidelity)
    if not args.json:
        print(
            f"psi1 ~ exp(-({alpha})x^2 + i{args.beta}x) and psi2 ~ exp(-({alpha.conjugate()})x^2 + i{args.beta}x) "
            f"have position densities that differ by at most {res.marginal_gap_q:.1e} and momentum "
            f"densities that differ by at most {res.marginal_gap_p:.1e}, yet their overlap "
            f"|<psi1|psi2>|^2 is {res.fidelity:.5f}. Position and momentum marginals alone do not "
            "fix the state; the full family of rotated quadratures does."
        )
    return report, EXIT_OK


def _fixture_state(name: str, dim: int, rng) -> np.ndarray:
    if name == "random":
        return random_density_matrix(dim, rng=rng)
    rho = np.zeros((dim, dim), dtype=complex)
    if name == "vacuum":
        rho[0, 0] = 1
    elif name == "fock1":
        rho[1, 1] = 1
    elif name == "coherent":
        c = fock.FockSpace(dim - 1).coherent_state(1.0)
        rho = np.outer(c, c.conj())
    else:
        raise UsageError(f"state {name!r} is not available for this scheme")
    return rho


def cmd_generate(args) -> tuple[RunReport, int]:
    """Write a tomogram fixture (and optionally the reference state)."""
    report = RunReport(f"generate --scheme {args.scheme}")
    rng = np.random.default_rng(args.seed)
    ref_doc = None
    if args.scheme == "finite":
        tset = random_minimal_set(args.dim, rng)
        rho = _fixture_state(args.state, args.dim, rng)
        doc = io.tomogram_to_json(tomogram(rho, tset))
        ref_doc = io.matrix_to_json(rho)
    elif args.scheme == "spin":
        j = _spin_j(args.j)
        rho = _fixture_state(args.state, int(2 * j + 1), rng)
        nt = args.nodes_theta or 8 * int(2 * j + 1)
        quad = spin.SphereQuadrature.gauss(nt, args.nodes_phi or nt)
        doc = io.spin_to_json(spin.spin_j_tomogram(rho, j, quad))
        ref_doc = io.matrix_to_json(rho)
    elif args.scheme == "photon":
        nmax = args.nmax if args.nmax is not None else 8
        rho = _fixture_state(args.state, 31 if args.state == "coherent" else nmax + 1, rng)
        grid = fock.PolarGrid(args.radius, args.nodes_theta or fock.DEFAULT_NODES, args.nodes_phi or fock.DEFAULT_NODES)
        doc = io.photon_to_json(fock.photon_tomogram_grid(rho, fock.DEFAULT_NMAX, grid), nmax)
        ref_doc = io.matrix_to_json(rho)
    else:
        if args.state not in ("ground", "vacuum"):
            raise UsageError("the symplectic generator supports --state ground")
        psi = sym.ground_state()
        ygrid = sym.UniformGrid(-8.0, 8.0, args.grid_q or sym.DEFAULT_Y_POINTS)
        nodes, w = sym.reconstruction_nodes(ygrid)
        doc = io.symplectic_to_json(sym.symplectic_tomogram_grid(psi, nodes, w), ygrid)
        ref_doc = io.wavefunction_to_json(psi)
    if not args.out:
        raise UsageError("generate needs --out")
    io.dump_json(doc, args.out)
    report.details["output"] = args.out
    if args.reference_out:
        io.dump_json(ref_doc, args.reference_out)
        report.details["reference"] = args.reference_out
    return report, EXIT_OK


# -- parser -----------------------------------------------------------------

def _open_s(text: str) -> float:
    s = float(text)
    if not -1 < s < 1:
        raise argparse.ArgumentTypeError(f"s={s} must lie in (-1, 1)")
    return s


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="seed for every random draw (default 42)")
    common.add_argument("--threads", type=_positive_int, default=1,
                        help="threads for grid reductions; results do not depend on it")
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--out", help="write the command's output document here")
    grids = argparse.ArgumentParser(add_help=False)
    grids.add_argument("--s", type=_open_s, help="photon kernel parameter in (-1, 1)")
    grids.add_argument("--nmax", type=_positive_int, help="Fock truncation of the output state")
    grids.add_argument("--radius", type=float, default=fock.DEFAULT_RADIUS, help="photon grid radius")
    grids.add_argument("--nodes-theta", type=_positive_int, help="theta (or radial) nodes")
    grids.add_argument("--nodes-phi", type=_positive_int, help="phi (or angular) nodes")
    grids.add_argument("--grid-q", type=_positive_int, help="points of the position grid")
    grids.add_argument("--j", default="1", help="spin quantum number, e.g. 1/2 or 3/2")
    grids.add_argument("--dim", type=_positive_int, default=3, help="dimension for finite sets")

    parser = argparse.ArgumentParser(prog="tomokit", description="Quantum tomography kernels and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-set", parents=[common], help="is a JSON projector set minimal?")
    p.add_argument("set_file")
    p.set_defaults(func=cmd_check_set)

    p = sub.add_parser("reconstruct", parents=[common, grids], help="invert a tomogram file")
    p.add_argument("--scheme", required=True, choices=["finite", "spin", "photon", "symplectic"])
    p.add_argument("--reference", help="reference state (matrix JSON, or wavefunction JSON for symplectic)")
    p.add_argument("tomogram_file")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("verify", parents=[common, grids], help="numerical identity checks")
    p.add_argument("target", choices=list(THRESHOLDS))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo-pauli", parents=[common], help="same marginals, different states")
    p.add_argument("alpha_re", type=float)
    p.add_argument("alpha_im", type=float)
    p.add_argument("beta", type=float)
    p.set_defaults(func=cmd_demo_pauli)

    p = sub.add_parser("generate", parents=[common, grids], help="write tomogram fixtures")
    p.add_argument("--scheme", required=True, choices=["finite", "spin", "photon", "symplectic"])
    p.add_argument("--state", default="random", help="random, vacuum, fock1, coherent or ground")
    p.add_argument("--reference-out", help="also write the source state here")
    p.set_defaults(func=cmd_generate)
    return parser


def _setup_logging() -> None:
    level = os.environ.get("TOMOKIT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    log.debug("arguments: %s", vars(args))
    try:
        report, code = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with 2
    except io.FormatError as exc:
        report = RunReport(args.command, status="error", details={"error": str(exc)})
        code = EXIT_USAGE
    except (ValueError, RankDeficientError, OverflowError) as exc:
        report = RunReport(args.command, status="error", details={"error": str(exc)})
        code = EXIT_FAIL
    if code != EXIT_OK:
        report.status = "error"
    print(report.to_json() if args.json else report.text())
    return code


if __name__ == "__main__":
    sys.exit(main())
