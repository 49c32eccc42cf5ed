"""``ergophase`` command line front end.

Every subcommand writes one primary result (JSON or CSV) to ``--out`` or to
standard output. With ``--out`` a ``<out>.meta.json`` side file records the
time of the run, so primary outputs stay byte-identical between runs.

Exit status: 0 success, 1 computation error, 2 input or validation error,
3 invariant-suite failure.
"""

import argparse
import csv
import io as _stdio
import logging
import math
import sys

import numpy as np

from . import __version__, app, checks, ergodic, freespace, semiclassical
from . import io as eio
from .errors import ErgophaseError, InputError, ValidationError

logger = logging.getLogger('ergophase')


# ------------------------------------------------------------------- parsing

def _split(spec, what):
    if spec is None:
        raise InputError(f"missing --{what}")
    if ':' in spec:
        basis, label = spec.split(':', 1)
        return basis, label
    return spec, None


def _basis(model, name, what):
    try:
        return model.bases[name]
    except KeyError:
        raise InputError(f"--{what}: unknown basis {name!r} "
                         f"(have {', '.join(sorted(model.bases))})") from None


def _basis_label(model, spec, what):
    """``BASIS:label`` -> (basis, index)."""
    name, label = _split(spec, what)
    if label is None:
        raise InputError(f"--{what} needs BASIS:label, got {spec!r}")
    B = _basis(model, name, what)
    try:
        return B, B.index(label)
    except (KeyError, IndexError, ValueError):
        raise InputError(f"--{what}: basis {name} has no vector {label!r}") from None


def _eigen_label(model, spec, what='n'):
    """Eigenvector index from ``E:label`` or a bare label."""
    name, label = _split(spec, what)
    if label is None:
        name, label = model.eigenbasis_name, name
    if name != model.eigenbasis_name:
        raise InputError(f"--{what} must index the eigenbasis {model.eigenbasis_name!r}")
    return _basis_label(model, f"{name}:{label}", what)[1]


def _state(model, spec, what):
    if spec in model.states:
        return model.states[spec]
    B, i = _basis_label(model, spec, what)
    return B[i]


def parse_kernel(text, hbar=1.0):
    """``gaussian:<sigma>``, ``uniform:<half width>`` or ``delta``."""
    if text is None:
        raise InputError("missing --kernel")
    kind, _, arg = text.partition(':')
    try:
        if kind == 'gaussian':
            return ergodic.RandomizationKernel.gaussian(float(arg))
        if kind == 'uniform':
            return ergodic.RandomizationKernel.uniform(float(arg))
        if kind == 'delta':
            return ergodic.RandomizationKernel.delta(float(arg) if arg else 0.0)
    except ValueError:
        raise InputError(f"--kernel: bad width in {text!r}") from None
    raise InputError(f"--kernel must be gaussian:<sigma>, uniform:<w> or delta, got {text!r}")


def _grid(args):
    if args.t0 is None or args.t1 is None or args.dt is None:
        raise InputError("this command needs --t0, --t1 and --dt")
    if not args.dt > 0:
        raise ValidationError("--dt must be positive")
    if not args.t1 > args.t0:
        raise ValidationError("--t1 must exceed --t0")
    n = int(round((args.t1 - args.t0) / args.dt))
    if abs(args.t0 + n * args.dt - args.t1) > 1e-9 * max(1.0, abs(args.t1)):
        raise ValidationError("(t1 - t0) / dt must be an integer")
    return args.t0 + args.dt * np.arange(n + 1)


def _model(args):
    if not args.model:
        raise InputError("missing --model")
    return eio.load_model(args.model)


def _tol(args):
    return checks.load_tolerances(args.tol_file)


# ------------------------------------------------------------------ commands

def cmd_kd_joint(args):
    model = _model(args)
    psi = _state(model, args.state or next(iter(model.states), None), 'state')
    A = _basis(model, _split(args.a, 'a')[0], 'a')
    B = _basis(model, _split(args.b, 'b')[0], 'b')
    tab = app.kd_joint(psi, A, B)
    rows = [((a, b), tab.values[i, j]) for i, a in enumerate(tab.axis_labels[0])
            for j, b in enumerate(tab.axis_labels[1])]
    result = {'command': 'kd-joint', 'state': psi.label, 'A': _split(args.a, 'a')[0],
              'B': _split(args.b, 'b')[0], 'a_labels': tab.axis_labels[0],
              'b_labels': tab.axis_labels[1], 'values': tab.values,
              'normalization_error': tab.normalization_error()}
    return result, (['a_label', 'b_label'], rows)


def cmd_cond_app(args):
    model = _model(args)
    tol = _tol(args)
    A, a = _basis_label(model, args.a, 'a')
    B, b = _basis_label(model, args.b, 'b')
    n_name = _split(args.n, 'n')[0] if args.n else model.eigenbasis_name
    N = model.spectrum if n_name == model.eigenbasis_name else _basis(model, n_name, 'n')
    p = app.conditional_app(A, B, N, a, b, tol['eps_sing'], eigenspace=args.eigenspace)
    labels = list(model.bases[n_name].labels)
    if args.eigenspace:
        labels = ['+'.join(labels[i] for i in g) for g in model.spectrum.degeneracy_groups]
    hb = model.hbar
    actions = [app.action_phase(v, hb) if v != 0 else None for v in p]
    result = {'command': 'cond-app', 'a': args.a, 'b': args.b, 'N': n_name,
              'n_labels': labels, 'values': p, 'actions': actions,
              'sum': complex(p.sum()), 'eigenspace': bool(args.eigenspace)}
    return result, (['n_label'], [((l,), v) for l, v in zip(labels, p)])


def cmd_evolve_app(args):
    model = _model(args)
    tol = _tol(args)
    A, a = _basis_label(model, args.a, 'a')
    B = _basis(model, _split(args.b, 'b')[0], 'b')
    n = _eigen_label(model, args.n)
    times = _grid(args)
    tab = app.time_dependent_app(A, B, model.spectrum, a, n, times, model.hbar,
                                 tol['eps_sing'], eigenspace=args.eigenspace)
    rows = [(t, b, tab.values[i, k]) for k, t in enumerate(times)
            for i, b in enumerate(B.labels)]
    result = {'command': 'evolve-app', 'a': args.a, 'B': _split(args.b, 'b')[0],
              'n': model.spectrum.basis.labels[n], 'E_n': model.spectrum.eigenvalues[n],
              'times': times, 'b_labels': B.labels, 'values': tab.values,
              'normalization_error': tab.normalization_error(),
              'basis_dependent': tab.metadata['basis_dependent']}
    return result, rows


def cmd_weak_energy(args):
    model = _model(args)
    tol = _tol(args)
    psi = _state(model, args.a, 'a')
    B, b = _basis_label(model, args.b, 'b')
    times = _grid(args)
    w = app.weak_energy_series(B, b, psi, model.spectrum, times, model.hbar, tol['eps_sing'])
    rows = [(t, B.labels[b], v) for t, v in zip(times, w.values)]
    result = {'command': 'weak-energy', 'a': args.a, 'b': args.b,
              'times': times, 'values': w.values}
    return result, rows


def _default_dt(model):
    E = model.spectrum.eigenvalues
    spread = float(E[-1] - E[0])
    return math.pi * model.hbar / (20 * spread) if spread > 0 else 1.0


def cmd_ergodic(args):
    model = _model(args)
    tol = _tol(args)
    eps = tol['eps_sing']
    A, a = _basis_label(model, args.a, 'a')
    B = _basis(model, _split(args.b, 'b')[0], 'b')
    n = _eigen_label(model, args.n)
    if args.T is None or not args.T > 0:
        raise InputError("ergodic needs a positive --T")
    dt = args.dt or _default_dt(model)
    spec = model.spectrum
    gen = ergodic.app_series_generator(A, B, spec, a, n, model.hbar, eps)
    numeric = ergodic.ergodic_average_numeric(gen, args.T, dt, model.hbar)
    rows, out = [], []
    for j, label in enumerate(B.labels):
        born = float(abs(np.vdot(B.matrix[:, j], spec.vectors[:, n])) ** 2)
        try:
            product = ergodic.ergodic_law_analytic(A, B, spec, a, j, n, eps)[0]
        except ErgophaseError:
            product = None              # P(n|a,b) undefined for <b|a> = 0
        out.append({'b': label, 'numeric': numeric[j], 'analytic_product': product,
                    'born': born, 'abs_error': abs(numeric[j] - born)})
        rows.append(((label,), numeric[j]))
    result = {'command': 'ergodic', 'a': args.a, 'B': _split(args.b, 'b')[0],
              'n': spec.basis.labels[n], 'T': args.T, 'dt': dt, 'results': out}
    return result, (['b_label'], rows)


def cmd_partial_ergodic(args):
    model = _model(args)
    tol = _tol(args)
    A, a = _basis_label(model, args.a, 'a')
    B = _basis(model, _split(args.b, 'b')[0], 'b')
    n = _eigen_label(model, args.n)
    G = parse_kernel(args.kernel)
    times = _grid(args)
    spec = model.spectrum
    gen = ergodic.app_series_generator(A, B, spec, a, n, model.hbar, tol['eps_sing'])
    tab = ergodic.partial_randomize(gen, G, times)
    E_prep = spec.eigenvalues[n]
    D = ergodic.decoherence_factors(G, spec.eigenvalues - E_prep, model.hbar)
    prior = np.abs(spec.vectors.conj().T @ A.matrix[:, a]) ** 2
    posterior = ergodic.bayesian_energy_update(prior, D)
    rows = [(t, b, tab.values[i, k]) for k, t in enumerate(times)
            for i, b in enumerate(B.labels)]
    result = {'command': 'partial-ergodic', 'a': args.a, 'B': _split(args.b, 'b')[0],
              'n': spec.basis.labels[n], 'kernel': {'kind': G.kind, 'center': G.center,
                                                    'width': G.width, 'std': G.std},
              'times': times, 'b_labels': B.labels, 'values': tab.values,
              'energies': spec.eigenvalues, 'decoherence_factors': D,
              'prior': prior, 'posterior': posterior}
    return result, rows


def cmd_uncertainty(args):
    G = parse_kernel(args.kernel)
    hb = args.hbar
    span = args.span if args.span else 12 * hb / G.std
    grid = np.linspace(-span, span, args.points)
    rep = ergodic.uncertainty_product(G, grid, hb)
    result = {'command': 'uncertainty', 'kernel': {'kind': G.kind, 'width': G.width},
              'delta_t': rep.delta_t, 'delta_E': rep.delta_E,
              'product_over_hbar': rep.product_over_hbar, 'bound': 1 / math.sqrt(2),
              'metadata': rep.metadata}
    return result, (['quantity'], [(('delta_E_delta_t_over_hbar',), rep.product_over_hbar)])


def cmd_semiclassical(args):
    model = _model(args)
    tol = _tol(args)
    eps = tol['eps_sing']
    A, a = _basis_label(model, args.a, 'a')
    B, b = _basis_label(model, args.b, 'b')
    n = _eigen_label(model, args.n)
    spec, hb = model.spectrum, model.hbar
    times = _grid(args)
    weak = app.weak_energy_series(B, b, A[a], spec, times, hb, eps)
    E_n = float(spec.eigenvalues[n])
    try:
        found = semiclassical.classical_arrival(weak, E_n)
        arrivals = 'flat' if found is semiclassical.Flat.EVERYWHERE else [
            {'t': c.t_classical, 'residual': c.residual} for c in found]
    except ErgophaseError as exc:
        arrivals = {'error': exc.code, 'message': str(exc)}
    # S_E per eigenvector, continued across levels, then t_nm for neighbours
    bn = spec.vectors.conj().T @ B.matrix[:, b]
    na = spec.vectors.conj().T @ A.matrix[:, a]
    ok = (np.abs(bn) > eps) & (np.abs(na) > eps)
    idx = np.flatnonzero(ok)
    S_E = semiclassical.unwrap_actions(np.angle(bn.conj() * na)[idx] * hb, hb)
    table = []
    for k in range(len(idx) - 1):
        i, j = idx[k], idx[k + 1]
        if spec.eigenvalues[j] == spec.eigenvalues[i]:
            continue
        t_nm = semiclassical.discrete_time_estimate(S_E[k + 1], S_E[k],
                                                    spec.eigenvalues[j], spec.eigenvalues[i])
        table.append({'n': spec.basis.labels[j], 'm': spec.basis.labels[i], 't_nm': t_nm})
    p = app.conditional_app(A, B, spec, a, b, eps)
    gap = np.diff(np.unique(spec.eigenvalues))
    base = float(gap.min()) if gap.size else 1.0
    deltas = args.delta_E or [base / 2 * 2 ** k for k in range(4)]
    sweep = [{'delta_E': d, 'im_l1': float(np.abs(
        semiclassical.coarse_grain_energy(p, spec.eigenvalues, d).imag).sum())} for d in deltas]
    result = {'command': 'semiclassical', 'a': args.a, 'b': args.b,
              'n': spec.basis.labels[n], 'E_n': E_n, 'arrivals': arrivals,
              't_nm': table, 'coarse_grain': sweep, 'kernel': 'gaussian',
              'degenerate_levels': bool(spec.is_degenerate)}
    rows = [((f"dE={s['delta_E']!r}",), s['im_l1']) for s in sweep]
    return result, (['quantity'], rows)


def _freespace_config(args):
    doc = eio.read_json(eio._resolve(args.config)) if args.config else {}
    keys = ('m', 'p', 'x0', 'x', 'hbar', 'V', 'E')
    params = {k: doc[k] for k in keys if k in doc}
    for k in keys:
        v = getattr(args, 'fs_' + k)
        if v is not None:
            params[k] = v
    T = args.T if args.T is not None else doc.get('T')
    if T is None or not T > 0:
        raise InputError("freespace needs a positive --T (or T in the config)")
    return freespace.FreeParticleConfig(**params), float(T)


def cmd_freespace(args):
    cfg, T = _freespace_config(args)
    if args.mode == 'propagate':
        if args.tc is not None and abs(args.tc - cfg.t_c) > 1e-9 * cfg.t_c:
            raise ValidationError(f"--tc {args.tc} differs from m L / p = {cfg.t_c!r}")
        r = freespace.partial_ergodic_free(cfg, T)
        width = freespace.stationary_width(cfg)
        split = freespace.free_action_split(cfg, cfg.t_c)
        result = {'command': 'freespace propagate', 'config': _cfg_dict(cfg), 'T': T,
                  't_c': cfg.t_c, 'delta_t': width, 'delta_t_over_T': width / T,
                  'numeric': r.numeric, 'claimed': r.claimed, 'integral': r.integral,
                  'abserr': r.abserr, 'rel_error': r.rel_error,
                  'actions_at_t_c': {'S_t': split.S_t, 'E_t': split.E_n_t, 'S_E': split.S_E,
                                     'total': split.total, 'residual': split.residual()}}
    else:
        r = freespace.tunnel_ergodic(cfg, T)
        result = {'command': 'freespace tunnel', 'config': _cfg_dict(cfg), 'T': T,
                  'kappa': cfg.kappa, 'numeric': r.numeric, 'claimed': r.claimed,
                  'integral': r.integral, 'abserr': r.abserr, 'rel_error': r.rel_error}
    return result, (['quantity'], [(('numeric',), r.numeric), (('claimed',), r.claimed)])


def _cfg_dict(cfg):
    return {k: getattr(cfg, k) for k in ('m', 'p', 'x0', 'x', 'hbar', 'V', 'E')}


def cmd_check(args):
    model = _model(args)
    tol = _tol(args)
    results = checks.run_checks(model, tol)
    report = {'command': 'check', 'model': args.model,
              'passed': all(r.passed for r in results),
              'results': [{'module': r.module, 'name': r.name, 'measured': r.measured,
                           'tolerance': r.tolerance, 'passed': r.passed, 'detail': r.detail}
                          for r in results]}
    return report, checks.format_report(results)


COMMANDS = {
    'kd-joint': (cmd_kd_joint, 'Kirkwood-Dirac joint quasi-probability of a state'),
    'cond-app': (cmd_cond_app, 'conditional action phase probability P(n|a,b)'),
    'evolve-app': (cmd_evolve_app, 'time series P(b(t)|a,n)'),
    'weak-energy': (cmd_weak_energy, 'weak value of energy H(b,a,t)'),
    'ergodic': (cmd_ergodic, 'long-time average against the ergodic law and Born rule'),
    'partial-ergodic': (cmd_partial_ergodic, 'kernel-randomized series, decoherence factors'),
    'uncertainty': (cmd_uncertainty, 'energy-time uncertainty product of a kernel'),
    'semiclassical': (cmd_semiclassical, 'arrival times, t_nm table, coarse-grain sweep'),
    'freespace': (cmd_freespace, 'closed-form free particle and tunneling checks'),
    'check': (cmd_check, 'run the full invariant suite on a model'),
}

SERIES = {'evolve-app', 'weak-energy', 'partial-ergodic'}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--model', help='model JSON file or bundled name (qubit, ladder16, random4)')
    common.add_argument('--a', help='initial condition, BASIS:label (or a state name)')
    common.add_argument('--b', help='final condition, BASIS or BASIS:label')
    common.add_argument('--n', help='energy eigenvector, E:label')
    common.add_argument('--state', help='state name or BASIS:label (kd-joint)')
    common.add_argument('--t0', type=float)
    common.add_argument('--t1', type=float)
    common.add_argument('--dt', type=float)
    common.add_argument('--tc', type=float, help='window centre (freespace propagate)')
    common.add_argument('--T', type=float, help='averaging window length')
    common.add_argument('--kernel', help='gaussian:<sigma>, uniform:<half width> or delta')
    common.add_argument('--out', help='output path (default: standard output)')
    common.add_argument('--format', choices=('csv', 'json'), help='output format')
    common.add_argument('--tol-file', help='JSON object of tolerance overrides')
    common.add_argument('--eigenspace', action='store_true',
                        help='sum over degenerate eigenspaces')

    parser = argparse.ArgumentParser(prog='ergophase', description=__doc__.splitlines()[0])
    parser.add_argument('--version', action='version', version=__version__)
    sub = parser.add_subparsers(dest='command', required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == 'freespace':
            p.add_argument('mode', choices=('propagate', 'tunnel'))
            p.add_argument('--config', help='freespace JSON config or bundled name')
            for k in ('m', 'p', 'x0', 'x', 'hbar', 'V', 'E'):
                p.add_argument('--' + k, dest='fs_' + k, type=float)
        if name == 'uncertainty':
            p.add_argument('--hbar', type=float, default=1.0)
            p.add_argument('--span', type=float, help='energy half-span of the grid')
            p.add_argument('--points', type=int, default=2001)
        if name == 'semiclassical':
            p.add_argument('--delta-E', type=float, nargs='+', dest='delta_E')
    return parser


def _render(command, result, table, fmt):
    if command == 'check':
        return eio.dumps(result) if fmt == 'json' else table + '\n'
    if fmt == 'json':
        return eio.dumps(result)
    buf = _stdio.StringIO()
    if command in SERIES:
        eio.write_series_csv(table, buf)
        return buf.getvalue()
    header, rows = table
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(list(header) + ['re', 'im', 'abs', 'arg'])
    for keys, z in rows:
        z = complex(z)
        w.writerow(list(keys) + [repr(z.real), repr(z.imag), repr(abs(z)),
                                 repr(math.atan2(z.imag, z.real))])
    return buf.getvalue()


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format='%(levelname)s: %(message)s')
    parser = build_parser()
    args = parser.parse_args(argv)
    fn = COMMANDS[args.command][0]
    fmt = args.format or ('csv' if args.command in SERIES else
                          'text' if args.command == 'check' else 'json')
    try:
        result, table = fn(args)
    except ErgophaseError as exc:
        print(f"error {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_status
    text = _render(args.command, result, table, fmt)
    if args.out:
        with open(args.out, 'w', newline='') as fh:
            fh.write(text)
        eio.write_metadata(args.out, args.command,
                           {'argv': list(sys.argv[1:] if argv is None else argv)})
    else:
        sys.stdout.write(text)
    if args.command == 'check' and not result['passed']:
        return 3
    return 0


if __name__ == '__main__':
    sys.exit(main())
