"""Command line entry point: ``npgrunsky <subcommand> [options]``.

Exit codes: 0 success, 2 bad flags, 3 unknown subcommand, 4 invalid domain,
5 invariant violation or numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .conformal import (
    DomainError,
    ExteriorMap,
    evaluate_map,
    load_domain,
    preset,
    scale_factor,
    univalence_check,
)
from .decay import (
    bound_constant,
    fit_decay,
    order_eigenvalues,
    paired_magnitudes,
    usable_range,
)
from .grunsky import (
    IDENTITY_TOL,
    grunsky_table_by_composition,
    grunsky_table_recursive,
    row_l2_report,
    symmetrize,
)
from .layer import (
    boundary_polygon,
    classify,
    continuity_residual,
    invert_map,
    matrix_action_values,
    np_via_jump,
    single_layer_exterior,
    single_layer_interior,
)
from .nystrom import build_kernel_matrix, compare, oracle_spectrum
from .spectrum import assemble, spectrum, tail_norm

EXIT_OK, EXIT_USAGE, EXIT_UNKNOWN, EXIT_DOMAIN, EXIT_INVARIANT = 0, 2, 3, 4, 5


def fmt(x: float) -> str:
    return f"{x:.17g}"


def domain_digest(m: ExteriorMap) -> str:
    canon = json.dumps(m.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def write_manifest(out: Path, args: argparse.Namespace, m: ExteriorMap) -> None:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    manifest = {
        "subcommand": args.command,
        "parameters": params,
        "domain": m.to_dict(),
        "domain_digest": domain_digest(m),
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    Path(str(out) + ".manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n")


def emit_csv(args, m: ExteriorMap, header: list[str], rows, out: str | None = None) -> None:
    out = out if out is not None else args.out
    if out is None:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    path = Path(out)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    write_manifest(path, args, m)


def emit_text(args, m: ExteriorMap, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        write_manifest(Path(args.out), args, m)


def get_domain(args) -> ExteriorMap:
    if args.domain and args.preset:
        raise DomainError("give either --domain or --preset, not both")
    if args.domain:
        return load_domain(args.domain)
    if args.preset:
        return preset(args.preset)
    raise DomainError("a domain is required (--domain <path> or --preset <spec>)")


# -- subcommands ---------------------------------------------------------------


def cmd_grunsky(args, m):
    if args.method == "composition":
        table = grunsky_table_by_composition(m, args.N)
    else:
        table = grunsky_table_recursive(m, args.N)
    mu = symmetrize(table, tol=IDENTITY_TOL * args.tol_scale)
    c = table.c
    rows = []
    for i in range(table.N):
        for j in range(table.N):
            rows.append([i + 1, j + 1, fmt(c[i, j].real), fmt(c[i, j].imag),
                         fmt(mu.mu_hat[i, j].real), fmt(mu.mu_hat[i, j].imag)])
    emit_csv(args, m, ["m", "k", "re_c", "im_c", "re_mu_normalized", "im_mu_normalized"], rows)


def _series_spectrum(m, N):
    mu = symmetrize(grunsky_table_recursive(m, N))
    return mu, spectrum(assemble(mu))


def cmd_spectrum(args, m):
    _, spec = _series_spectrum(m, args.N)
    rows = [[i + 1, fmt(x), fmt(abs(x))] for i, x in enumerate(spec.eigenvalues)]
    emit_csv(args, m, ["k", "lambda", "abs_lambda"], rows)
    if args.vectors:
        N = args.N
        labels = [f"zeta_{j}" for j in range(1, N + 1)] + [f"zeta_-{j}" for j in range(1, N + 1)]
        vrows = []
        for i in range(2 * N):
            v = spec.vectors[:, i]
            vrows.append([i + 1, fmt(spec.eigenvalues[i])] + [fmt(x) for z in v for x in (z.real, z.imag)])
        header = ["k", "lambda"] + [f"{p}_{lab}" for lab in labels for p in ("re", "im")]
        emit_csv(args, m, header, vrows, out=args.vectors)


def _parse_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def cmd_tailnorm(args, m):
    mu = symmetrize(grunsky_table_recursive(m, args.N))
    cuts = _parse_list(args.cuts) if args.cuts else list(range(args.N))
    emit_csv(args, m, ["N_cut", "tail_norm"], [[c, fmt(tail_norm(mu, c))] for c in cuts])


def cmd_oracle(args, m):
    spec = oracle_spectrum(build_kernel_matrix(m, args.n), args.count)
    rows = [[i + 1, fmt(x), fmt(abs(x))] for i, x in enumerate(spec.eigenvalues)]
    rows.append(["zeta0", fmt(spec.zeta0_eigenvalue), fmt(abs(spec.zeta0_eigenvalue))])
    emit_csv(args, m, ["k", "lambda", "abs_lambda"], rows)


def cmd_compare(args, m):
    mu, series = _series_spectrum(m, args.N)
    oracle = oracle_spectrum(build_kernel_matrix(m, args.n), max(args.count, 2))
    rep = compare(series, oracle, args.count)
    text = rep.as_text() + (
        f"tail_norm_N = {fmt(tail_norm(mu, args.N - 1))}\n"
        f"oracle_zeta0_eigenvalue = {fmt(oracle.zeta0_eigenvalue)}\n"
        f"oracle_imag_residue = {fmt(oracle.meta['imag_residue'])}\n"
    )
    emit_text(args, m, text)


def cmd_potential(args, m):
    N = max(args.N, abs(args.m))
    table = grunsky_table_recursive(m, N)
    poly = boundary_polygon(m)
    lo_x, hi_x = poly.real.min(), poly.real.max()
    lo_y, hi_y = poly.imag.min(), poly.imag.max()
    pad = 0.25 * max(hi_x - lo_x, hi_y - lo_y)
    xs = np.linspace(lo_x - pad, hi_x + pad, args.grid)
    ys = np.linspace(lo_y - pad, hi_y + pad, args.grid)
    Z = (xs[None, :] + 1j * ys[:, None]).ravel()
    side = classify(m, Z, poly)
    vals = np.empty(Z.shape, dtype=complex)
    inside = side != "exterior"
    vals[inside] = single_layer_interior(m, args.m, Z[inside])
    if np.any(~inside):
        w = invert_map(m, Z[~inside])
        v, _, _ = single_layer_exterior(m, table, args.m, np.log(np.abs(w)), np.angle(w))
        vals[~inside] = v
    rows = [[fmt(z.real), fmt(z.imag), fmt(v.real), fmt(v.imag), s] for z, v, s in zip(Z, vals, side)]
    emit_csv(args, m, ["x", "y", "re_S", "im_S", "side"], rows)


def jump_report(m, mode: int, N: int, eps: float, n_theta: int = 64) -> dict:
    table = grunsky_table_recursive(m, max(N, abs(mode)))
    mat = assemble(symmetrize(table))
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    res = np_via_jump(m, table, mode, theta, eps=eps)
    ma = matrix_action_values(m, mat, mode, theta)
    r1 = continuity_residual(m, table, mode, 256, 1e-3)
    r2 = continuity_residual(m, table, mode, 256, 5e-4)
    return {
        "mode": mode,
        "continuity_residual_eps": r1,
        "continuity_residual_half_eps": r2,
        "continuity_ratio": r1 / r2 if r2 > 0 else float("nan"),
        "np_via_jump_vs_matrix": float(np.abs(res.value - ma).max()),
        "richardson_ratio": res.ratio,
        "flagged": res.flagged,
    }


def cmd_validate_jump(args, m):
    rep = jump_report(m, args.m, args.N, args.eps)
    emit_text(args, m, "".join(f"{k} = {fmt(v) if isinstance(v, float) else v}\n" for k, v in rep.items()))


def cmd_decay(args, m):
    _, spec = _series_spectrum(m, args.N)
    spec = order_eigenvalues(spec)
    mag = paired_magnitudes(spec)
    if args.range:
        lo, hi = _parse_list(args.range)
    else:
        mu = symmetrize(grunsky_table_recursive(m, args.N))
        lo, hi = usable_range(spec, tail_norm(mu, args.N - 1) + 1e-16)
    rep = fit_decay(spec, args.model, (lo, hi))
    C = bound_constant(spec, args.p, args.alpha, (lo, hi))
    e = args.p + args.alpha - 0.5
    k = np.arange(1, len(mag) + 1)
    fitted = rep.predict(k)
    rows = [[int(i), fmt(a), fmt(f), fmt(C * i ** (-e))] for i, a, f in zip(k, mag, fitted)]
    emit_csv(args, m, ["k", "abs_lambda_2k", "fitted", "bound"], rows)
    sys.stderr.write(f"model = {rep.model}\nslope = {fmt(rep.slope)}\nintercept = {fmt(rep.intercept)}\n"
                     f"fit_range = {lo},{hi}\nresidual = {fmt(rep.residual)}\nbound_constant = {fmt(C)}\n")


def run_validation(m: ExteriorMap, N: int, n: int, jump_window: int, seed: int) -> list[tuple[str, float, float, bool]]:
    """Full invariant sweep. Returns (name, value, tolerance, ok) rows; tolerances are fixed."""
    checks = []

    def add(name, value, tol, ok=None):
        value = float(value)
        checks.append((name, value, tol, bool(value <= tol) if ok is None else bool(ok)))

    uv = univalence_check(m)
    add("univalence_necessary_margin_negated", -uv.necessary_margin, 0.0)
    table = grunsky_table_recursive(m, N)
    add("grunsky_identity_residual", table.identity_residual(), 1e-10)
    comp = grunsky_table_by_composition(m, N)
    add("recursion_vs_composition", np.abs(table.c_hat - comp.c_hat).max(), 1e-9)
    mu = symmetrize(table)
    add("row_l2_max", row_l2_report(mu).max(), 1.0)
    mat = assemble(mu, check=False)
    add("sigma_max_minus_half", np.linalg.norm(mat.G, 2) - 0.5, 1e-12)
    spec = spectrum(mat)
    herm = np.sort(np.linalg.eigvalsh(mat.hermitian()))
    add("hermitian_symmetry", np.abs(herm + herm[::-1]).max(), 1e-12)
    add("hermitian_vs_svd", np.abs(herm - np.sort(spec.eigenvalues)).max(), 1e-12)
    mag = np.abs(spec.eigenvalues)
    weyl = max((mag[2 * k] - tail_norm(mu, k) for k in range(N)), default=0.0)
    add("weyl_courant_excess", weyl, 1e-10)
    jw = max(jump_window, N)
    worst_jump, worst_ratio = 0.0, 0.0
    for mode in range(1, min(8, N) + 1):
        rep = jump_report(m, mode, jw, 1e-4, n_theta=32)
        worst_jump = max(worst_jump, rep["np_via_jump_vs_matrix"])
        r = rep["continuity_ratio"]
        if rep["continuity_residual_eps"] > 1e-12:
            worst_ratio = max(worst_ratio, abs(r - 2.0))
    add("np_via_jump_vs_matrix", worst_jump, 1e-5)
    add("continuity_ratio_deviation", worst_ratio, 0.3)
    rng = np.random.default_rng(seed)
    oracle = oracle_spectrum(build_kernel_matrix(m, n), min(n - 1, 20))
    add("oracle_zeta0_deviation", abs(oracle.zeta0_eigenvalue - 0.5), 1e-8)
    count = min(10, 2 * N)
    dev = compare(spec, oracle, count).max_abs
    add("oracle_top_deviation_minus_tail", dev - tail_norm(mu, N - 1), 1e-8)
    # random exterior points: conformality of the coordinates
    rho = m.rho0 + rng.uniform(0.05, 1.0, 8)
    th = rng.uniform(0, 2 * np.pi, 8)
    d = 1e-6
    hr = np.abs(evaluate_map(m, np.exp(rho + d + 1j * th)) - evaluate_map(m, np.exp(rho - d + 1j * th))) / (2 * d)
    ht = np.abs(evaluate_map(m, np.exp(rho + 1j * (th + d))) - evaluate_map(m, np.exp(rho + 1j * (th - d)))) / (2 * d)
    h = scale_factor(m, rho, th)
    add("conformality_rel", max(np.abs(hr / h - 1).max(), np.abs(ht / h - 1).max()), 1e-8)
    return checks


def cmd_validate(args, m):
    checks = run_validation(m, args.N, args.n, args.jump_window, args.seed)
    _, spec = _series_spectrum(m, args.N)
    lines = [f"{name} = {fmt(v)} tol={tol:g} {'PASS' if ok else 'FAIL'}\n" for name, v, tol, ok in checks]
    lines.append(f"top_eigenvalues = {','.join(fmt(x) for x in spec.eigenvalues[:6])}\n")
    ok = all(c[3] for c in checks)
    lines.append(f"status = {'PASS' if ok else 'FAIL'}\n")
    emit_text(args, m, "".join(lines))
    return EXIT_OK if ok else EXIT_INVARIANT


COMMANDS = {
    "grunsky": cmd_grunsky,
    "spectrum": cmd_spectrum,
    "tailnorm": cmd_tailnorm,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "potential": cmd_potential,
    "validate-jump": cmd_validate_jump,
    "decay": cmd_decay,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", help="JSON domain document")
    common.add_argument("--preset", help="preset, e.g. ellipse:a=0.5,gamma=1")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-scale", type=float, default=1.0,
                        help="multiply default tolerances (ignored by validate)")

    p = argparse.ArgumentParser(prog="npgrunsky", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("grunsky", parents=[common])
    s.add_argument("-N", type=int, required=True)
    s.add_argument("--method", choices=["recursive", "composition"], default="recursive")

    s = sub.add_parser("spectrum", parents=[common])
    s.add_argument("-N", type=int, required=True)
    s.add_argument("--vectors")

    s = sub.add_parser("tailnorm", parents=[common])
    s.add_argument("-N", type=int, required=True)
    s.add_argument("--cuts", help="comma separated cut indices")

    s = sub.add_parser("oracle", parents=[common])
    s.add_argument("-n", type=int, default=512)
    s.add_argument("--count", type=int, default=20)

    s = sub.add_parser("compare", parents=[common])
    s.add_argument("-N", type=int, default=64)
    s.add_argument("-n", type=int, default=512)
    s.add_argument("--count", type=int, default=10)

    s = sub.add_parser("potential", parents=[common])
    s.add_argument("-m", type=int, required=True)
    s.add_argument("--grid", type=int, default=64)
    s.add_argument("-N", type=int, default=64, help="Grunsky window for the exterior series")

    s = sub.add_parser("validate-jump", parents=[common])
    s.add_argument("-m", type=int, required=True)
    s.add_argument("-N", type=int, default=256)
    s.add_argument("--eps", type=float, default=1e-4)

    s = sub.add_parser("decay", parents=[common])
    s.add_argument("-N", type=int, default=64)
    s.add_argument("--model", choices=["power", "exp", "exponential"], default="power")
    s.add_argument("--p", type=float, default=1.0)
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--range", help="fit range lo,hi (default: truncation-safe window)")

    s = sub.add_parser("validate", parents=[common])
    s.add_argument("-N", type=int, default=64)
    s.add_argument("-n", type=int, default=512)
    s.add_argument("--jump-window", type=int, default=256)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        sys.stderr.write(f"npgrunsky: unknown subcommand {argv[0]!r}; choose from {', '.join(COMMANDS)}\n")
        return EXIT_UNKNOWN
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.command == "validate":
        args.tol_scale = 1.0
    try:
        m = get_domain(args)
        status = COMMANDS[args.command](args, m)
    except DomainError as exc:
        sys.stderr.write(f"npgrunsky: invalid domain: {exc}\n")
        return EXIT_DOMAIN
    except (ArithmeticError, ValueError) as exc:
        sys.stderr.write(f"npgrunsky: {exc}\n")
        return EXIT_INVARIANT
    return status or EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
