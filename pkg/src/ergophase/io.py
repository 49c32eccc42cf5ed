"""Model files and result serialization.

Model files are JSON documents with ``"schema_version": 1``::

    {
      "schema_version": 1,
      "dim": 2,
      "hbar": 1.0,
      "hamiltonian": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
      "bases": {
        "Z": {"matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]], "labels": ["0", "1"]},
        "E": {"eigenbasis_of": "hamiltonian", "labels": ["1", "0"]}
      },
      "states": {"plus": [[0.7071067811865476, 0], [0.7071067811865476, 0]]}
    }

Complex numbers are always ``[re, im]`` pairs; matrices list rows, and the
columns of a basis matrix are its vectors. Results use the same encoding.
"""

import csv
import json
import logging
import math
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InputError, NotHermitian, ParseError, ValidationError
from .hilbert import OrthonormalBasis, StateVector
from .models import ModelSystem

__all__ = ['SCHEMA_VERSION', 'load_model', 'model_to_dict', 'save_model',
           'bundled_fixture', 'to_jsonable', 'dumps', 'write_json', 'read_json',
           'write_series_csv', 'write_metadata']

SCHEMA_VERSION = 1
STATE_TOL = 1e-8
logger = logging.getLogger(__name__)


def _complex_array(obj, where, ndim):
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: expected numbers in [re, im] pairs ({exc})") from None
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise ParseError(f"{where}: expected a {ndim}-d array of [re, im] pairs, "
                         f"got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{where}: non-finite entry")
    return arr[..., 0] + 1j * arr[..., 1]


def _encode_complex_array(arr):
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def bundled_fixture(name):
    """Path of a fixture shipped in ``ergophase/data`` (``name`` without .json)."""
    path = resources.files('ergophase') / 'data' / f'{name}.json'
    if not path.is_file():
        raise InputError(f"no bundled fixture named {name!r}")
    return Path(str(path))


def _resolve(path):
    p = Path(path)
    if p.exists():
        return p
    if p.suffix == '' and '/' not in str(path):
        return bundled_fixture(str(path))
    raise InputError(f"model file {path} not found")


def read_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}",
                         exc.lineno, exc.colno) from None


def load_model(path, eps_deg=None):
    """Read, validate and diagonalize a model file.

    ``path`` may also name a bundled fixture (``'qubit'``, ``'ladder16'``, ...).
    """
    path = _resolve(path)
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    version = doc.get('schema_version', SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParseError(f"{path}: unsupported schema_version {version!r}")
    for key in ('dim', 'hamiltonian'):
        if key not in doc:
            raise ParseError(f"{path}: missing field {key!r}")
    dim = doc['dim']
    if not isinstance(dim, int) or dim < 1:
        raise ParseError(f"{path}: field 'dim' must be a positive integer")
    H = _complex_array(doc['hamiltonian'], 'hamiltonian', 2)
    if H.shape != (dim, dim):
        raise ValidationError(f"hamiltonian: shape {H.shape} does not match dim {dim}")
    asym = np.abs(H - H.conj().T)
    if asym.max() > 1e-10:
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        raise NotHermitian(f"hamiltonian: not Hermitian, max |H - H^dagger| = "
                           f"{asym.max():.3e} at entry ({i}, {j})")
    hbar = float(doc.get('hbar', 1.0))
    if not hbar > 0:
        raise ValidationError("hbar: must be positive")

    bases, eigen_name, eigen_labels = {}, 'E', None
    for name, entry in (doc.get('bases') or {}).items():
        where = f"bases.{name}"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        labels = tuple(str(x) for x in entry.get('labels', ()))
        if 'eigenbasis_of' in entry:
            if entry['eigenbasis_of'] != 'hamiltonian':
                raise ValidationError(f"{where}.eigenbasis_of: only 'hamiltonian' is supported")
            eigen_name, eigen_labels = name, labels or None
            continue
        if 'matrix' not in entry:
            raise ParseError(f"{where}: needs 'matrix' or 'eigenbasis_of'")
        M = _complex_array(entry['matrix'], f"{where}.matrix", 2)
        if M.shape != (dim, dim):
            raise ValidationError(f"{where}.matrix: shape {M.shape} does not match dim {dim}")
        dev = np.abs(M.conj().T @ M - np.eye(dim))
        if dev.max() > 1e-10:
            norms = np.linalg.norm(M, axis=0)
            raise ValidationError(
                f"{where}.matrix: not unitary, max |U^dagger U - 1| = {dev.max():.3e} "
                f"(column norms {np.round(norms, 12).tolist()})")
        bases[name] = OrthonormalBasis(M, labels)

    states = {}
    for name, amps in (doc.get('states') or {}).items():
        v = _complex_array(amps, f"states.{name}", 1)
        if v.shape != (dim,):
            raise ValidationError(f"states.{name}: length {v.shape[0]} does not match dim {dim}")
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValidationError(f"states.{name}: zero vector")
        if abs(norm - 1) > STATE_TOL:
            logger.warning("states.%s has norm %.12g; renormalized", name, norm)
        if abs(norm - 1) > 4 * np.finfo(float).eps:   # keep round-trips bit-exact
            v = v / norm
        states[name] = StateVector(v, name)

    if eigen_labels is not None and len(eigen_labels) != dim:
        raise ValidationError(f"bases.{eigen_name}.labels: need {dim} labels")
    model = ModelSystem(H, bases, states, hbar, eigen_name, eps_deg, eigen_labels)
    object.__setattr__(model, 'source', str(path))
    return model


def model_to_dict(model):
    bases = {}
    for name, basis in model.bases.items():
        if name == model.eigenbasis_name:
            bases[name] = {'eigenbasis_of': 'hamiltonian', 'labels': list(basis.labels)}
        else:
            bases[name] = {'matrix': _encode_complex_array(basis.matrix),
                           'labels': list(basis.labels)}
    return {
        'schema_version': SCHEMA_VERSION,
        'dim': model.dim,
        'hbar': model.hbar,
        'hamiltonian': _encode_complex_array(model.hamiltonian),
        'bases': bases,
        'states': {k: _encode_complex_array(v.amplitudes) for k, v in model.states.items()},
    }


def save_model(model, path):
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1) + '\n')


def to_jsonable(obj):
    """Recursively convert numpy values and complex numbers to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return _encode_complex_array(obj)
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if not math.isfinite(x):
            return repr(x)
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(result):
    """Deterministic JSON text. Floats use the shortest round-trip repr."""
    doc = {'schema_version': SCHEMA_VERSION}
    doc.update(to_jsonable(result))
    return json.dumps(doc, indent=1, sort_keys=False) + '\n'


def write_json(result, path):
    Path(path).write_text(dumps(result))


def write_series_csv(rows, path_or_file):
    """Write ``(t, b_label, value)`` rows as t,b_label,re,im,abs,arg."""
    own = isinstance(path_or_file, (str, Path))
    fh = open(path_or_file, 'w', newline='') if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator='\n')
        w.writerow(['t', 'b_label', 're', 'im', 'abs', 'arg'])
        for t, label, z in rows:
            z = complex(z)
            w.writerow([repr(float(t)), label, repr(z.real), repr(z.imag),
                        repr(abs(z)), repr(math.atan2(z.imag, z.real))])
    finally:
        if own:
            fh.close()


def write_metadata(out_path, command, extra=None):
    """Side file ``<out>.meta.json`` with the run timestamp and version."""
    meta = {'command': command, 'version': __version__,
            'created': datetime.now(timezone.utc).isoformat()}
    if extra:
        meta.update(to_jsonable(extra))
    Path(str(out_path) + '.meta.json').write_text(json.dumps(meta, indent=1) + '\n')
