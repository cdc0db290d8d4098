"""
On-disk formats: grid and ensemble snapshots, distance series and
tables as CSV, heatmaps as binary portable pixmaps, and the run manifest.

Snapshot layout (grid and ensemble)::

    WIGNERWEB-GRID 1\\n             (or WIGNERWEB-ENSEMBLE 1)
    key=value\\n                    (one per line, floats written with repr)
    parameters={json}\\n            (resolved parameters, one line)
    END\\n
    <row-major little-endian float64 payload>

grid payload: n_q * n_p values, ``values[i, j]`` at offset (i * n_p + j) * 8;
ensemble payload: size rows of (q, p).
"""
import csv
import json
import logging
import os
from collections import OrderedDict

import numpy as np

from .grid import GridSpec, PhaseSpaceGrid
from .observables import CSV_HEADER, DistanceRecord
from .oracles import TrajectoryEnsemble
from .utils import file_checksum

logger = logging.getLogger(__name__)

GRID_MAGIC = 'WIGNERWEB-GRID 1'
ENSEMBLE_MAGIC = 'WIGNERWEB-ENSEMBLE 1'
END = 'END'
PAYLOAD_DTYPE = np.dtype('<f8')
SIGNED = 'signed'
UNSIGNED = 'unsigned'
MANIFEST_NAME = 'manifest.json'
ARTIFACT_KINDS = ('series', 'snapshot', 'heatmap', 'table', 'fit', 'ensemble')


def _dumps(data):
    return json.dumps(data, sort_keys=True, separators=(',', ':'))


def _write_snapshot(path, magic, header, parameters, payload):
    lines = [magic]
    lines += ['{0}={1}'.format(key, value) for key, value in header.items()]
    lines.append('parameters={0}'.format(_dumps(parameters or {})))
    lines.append(END)
    try:
        with open(path, 'wb') as f:
            f.write(('\n'.join(lines) + '\n').encode('ascii'))
            f.write(np.ascontiguousarray(payload, dtype=PAYLOAD_DTYPE).tobytes())
    except OSError as e:
        raise OSError('cannot write snapshot "{0}": {1}'.format(path, e)) from e


def _read_snapshot(path, magic):
    with open(path, 'rb') as f:
        first = f.readline().decode('ascii').rstrip('\n')
        if first != magic:
            raise ValueError('"{0}" is not a {1} file'.format(path, magic.split()[0]))
        header = OrderedDict()
        while True:
            line = f.readline()
            if not line:
                raise ValueError('"{0}": header is not terminated by {1}'.format(path, END))
            line = line.decode('ascii').rstrip('\n')
            if line == END:
                break
            key, _, value = line.partition('=')
            header[key] = value
        payload = np.frombuffer(f.read(), dtype=PAYLOAD_DTYPE)
    parameters = json.loads(header.pop('parameters', '{}'))
    return header, parameters, payload


def write_grid_snapshot(grid, path, parameters=None):
    spec = grid.spec
    header = OrderedDict([('n_q', spec.n_q), ('n_p', spec.n_p),
                          ('q_min', repr(spec.q_min)), ('q_max', repr(spec.q_max)),
                          ('p_min', repr(spec.p_min)), ('p_max', repr(spec.p_max)),
                          ('label', grid.label.value)])
    _write_snapshot(path, GRID_MAGIC, header, parameters, grid.values)


def read_grid_snapshot(path):
    """
    returns ``(grid, parameters)``
    """
    header, parameters, payload = _read_snapshot(path, GRID_MAGIC)
    spec = GridSpec(n_q=int(header['n_q']), n_p=int(header['n_p']),
                    q_min=float(header['q_min']), q_max=float(header['q_max']),
                    p_min=float(header['p_min']), p_max=float(header['p_max']))
    if payload.size != spec.n_q * spec.n_p:
        raise ValueError('"{0}": expected {1} values, found {2}'.format(path, spec.n_q * spec.n_p,
                                                                       payload.size))
    return PhaseSpaceGrid(spec, payload.reshape(spec.shape), header['label']), parameters


def write_ensemble_snapshot(ens, path, parameters=None):
    header = OrderedDict([('size', ens.size), ('rng_seed', ens.rng_seed), ('kicks', ens.kicks)])
    _write_snapshot(path, ENSEMBLE_MAGIC, header, parameters, np.column_stack([ens.q, ens.p]))


def read_ensemble_snapshot(path):
    header, parameters, payload = _read_snapshot(path, ENSEMBLE_MAGIC)
    size = int(header['size'])
    if payload.size != 2 * size:
        raise ValueError('"{0}": expected {1} trajectories'.format(path, size))
    rows = payload.reshape(size, 2)
    ens = TrajectoryEnsemble(rows[:, 0].copy(), rows[:, 1].copy(),
                             int(header['rng_seed']), int(header['kicks']))
    return ens, parameters


def _comment_block(metadata):
    return ['# {0}: {1}'.format(key, _dumps(value)) for key, value in metadata.items()]


def write_table_csv(path, header, rows, metadata=None):
    """
    CSV preceded by ``# key: json`` comment lines
    """
    try:
        with open(path, 'w', newline='') as f:
            for line in _comment_block(metadata or {}):
                f.write(line + '\n')
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    except OSError as e:
        raise OSError('cannot write table "{0}": {1}'.format(path, e)) from e


def read_table_csv(path):
    """
    returns ``(metadata, header, rows)`` with cells left as strings
    """
    metadata = OrderedDict()
    with open(path, newline='') as f:
        lines = f.read().splitlines()
    body = []
    for line in lines:
        if line.startswith('# '):
            key, _, value = line[2:].partition(': ')
            metadata[key] = json.loads(value)
        else:
            body.append(line)
    reader = csv.reader(body)
    header = next(reader)
    return metadata, header, list(reader)


def write_series_csv(series, path, config=None):
    metadata = series.metadata()
    if config is not None:
        metadata['config'] = config
    rows = [(r.n, r.distance, r.norm_q, r.norm_cl, r.negativity) for r in series.records]
    write_table_csv(path, CSV_HEADER, rows, metadata)


def read_series_csv(path):
    metadata, _, rows = read_table_csv(path)
    records = [DistanceRecord(int(row[0]), *[float(v) for v in row[1:]]) for row in rows]
    return metadata, records


def heatmap_pixels(grid, palette=SIGNED):
    """
    RGB image with q along the columns and p increasing upwards
    """
    image = grid.values.T[::-1]
    if palette == SIGNED:
        scale = float(np.max(np.abs(image)))
        t = image / scale if scale > 0 else np.zeros_like(image)
        fade = 1 - np.abs(t)
        # white at zero, red for positive values, blue for negative ones
        red = np.where(t >= 0, 1.0, fade)
        blue = np.where(t <= 0, 1.0, fade)
        rgb = np.stack([red, fade, blue], axis=-1)
    elif palette == UNSIGNED:
        scale = float(np.max(image))
        t = np.clip(image / scale, 0, 1) if scale > 0 else np.zeros_like(image)
        rgb = np.stack([t, t, t], axis=-1)
    else:
        raise ValueError('unknown palette "{0}"'.format(palette))
    return np.round(rgb * 255).astype(np.uint8)


def write_heatmap(grid, path, palette=SIGNED, comment=None):
    """
    writes a binary portable pixmap (P6); ``comment`` ends up as a
    header comment line
    """
    pixels = heatmap_pixels(grid, palette)
    height, width, _ = pixels.shape
    header = 'P6\n'
    if comment:
        header += '# {0}\n'.format(comment.replace('\n', ' '))
    header += '{0} {1}\n255\n'.format(width, height)
    try:
        with open(path, 'wb') as f:
            f.write(header.encode('ascii'))
            f.write(pixels.tobytes())
    except OSError as e:
        raise OSError('cannot write heatmap "{0}": {1}'.format(path, e)) from e


def read_ppm(path):
    """
    returns ``(pixels, comments)`` of a binary portable pixmap
    """
    with open(path, 'rb') as f:
        data = f.read()
    tokens, comments, position = [], [], 0
    while len(tokens) < 4:
        end = data.index(b'\n', position)
        line = data[position:end].decode('ascii')
        position = end + 1
        if line.startswith('#'):
            comments.append(line[1:].strip())
            continue
        tokens.extend(line.split())
    magic, width, height, depth = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic != 'P6' or depth != 255:
        raise ValueError('"{0}" is not an 8-bit P6 pixmap'.format(path))
    pixels = np.frombuffer(data[position:], dtype=np.uint8).reshape(height, width, 3)
    return pixels, comments


class Manifest(object):
    """
    every artifact of a run: relative path, kind, scenario,
    resolved parameters and md5 checksum, kept in ``manifest.json``
    """
    def __init__(self, output_dir, scenario, config=None):
        self.output_dir = output_dir
        self.scenario = scenario
        self.config = config or {}
        self.artifacts = []

    @property
    def path(self):
        return os.path.join(self.output_dir, MANIFEST_NAME)

    def __contains__(self, path):
        return any(a['path'] == path for a in self.artifacts)

    def __iter__(self):
        return iter(self.artifacts)

    def __len__(self):
        return len(self.artifacts)

    def add(self, path, kind, parameters=None):
        """
        registers a file already written inside ``output_dir``
        """
        if kind not in ARTIFACT_KINDS:
            raise ValueError('unknown artifact kind "{0}"'.format(kind))
        relative = os.path.relpath(path, self.output_dir)
        if relative in self:
            raise ValueError('artifact "{0}" is already listed in the manifest'.format(relative))
        entry = OrderedDict([('path', relative),
                             ('kind', kind),
                             ('scenario', self.scenario),
                             ('parameters', parameters or {}),
                             ('checksum', file_checksum(os.path.join(self.output_dir, relative)))])
        self.artifacts.append(entry)
        logger.debug('artifact %s (%s) %s', relative, kind, entry['checksum'])
        return entry

    def as_dict(self):
        return OrderedDict([('scenario', self.scenario),
                            ('config', self.config),
                            ('artifacts', self.artifacts)])

    def save(self):
        with open(self.path, 'w') as f:
            json.dump(self.as_dict(), f, indent=4, sort_keys=True)
            f.write('\n')
        return self.path

    @classmethod
    def load(cls, output_dir):
        with open(os.path.join(output_dir, MANIFEST_NAME)) as f:
            data = json.load(f, object_pairs_hook=OrderedDict)
        manifest = cls(output_dir, data['scenario'], data['config'])
        manifest.artifacts = data['artifacts']
        return manifest

    def verify(self):
        """
        returns the relative paths whose checksum no longer matches (or which are missing)
        """
        failed = []
        for artifact in self.artifacts:
            path = os.path.join(self.output_dir, artifact['path'])
            if not os.path.exists(path) or file_checksum(path) != artifact['checksum']:
                failed.append(artifact['path'])
        return failed
