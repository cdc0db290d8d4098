import os

import numpy as np
from django.test import SimpleTestCase

from . import GridTestMixin, TemporaryOutputMixin
from ..formats import (SIGNED, UNSIGNED, Manifest, heatmap_pixels, read_ensemble_snapshot,
                       read_grid_snapshot, read_ppm, read_series_csv, read_table_csv, write_ensemble_snapshot,
                       write_grid_snapshot, write_heatmap, write_series_csv, write_table_csv)
from ..grid import Label, new_cat_state
from ..observables import DistanceRecord, DistanceSeries
from ..oracles import sample_coherent_ensemble
from ..params import DecoherenceParams, SystemParams


class TestSnapshots(TemporaryOutputMixin, GridTestMixin, SimpleTestCase):
    def test_grid_snapshot(self):
        grid = self._coherent((0.5, -1.0), label=Label.CLASSICAL)
        path = os.path.join(self.output_dir, 'grid.bin')
        write_grid_snapshot(grid, path, {'K': 2.0, 'eta': 0.3})
        loaded, parameters = read_grid_snapshot(path)
        self.assertEqual(loaded.spec, grid.spec)
        self.assertIs(loaded.label, Label.CLASSICAL)
        self.assertTrue(np.array_equal(loaded.values, grid.values))
        self.assertEqual(parameters, {'K': 2.0, 'eta': 0.3})

    def test_bad_magic(self):
        path = os.path.join(self.output_dir, 'grid.bin')
        with open(path, 'wb') as f:
            f.write(b'SOMETHING-ELSE 1\nEND\n')
        with self.assertRaises(ValueError):
            read_grid_snapshot(path)

    def test_truncated_payload(self):
        path = os.path.join(self.output_dir, 'grid.bin')
        write_grid_snapshot(self._coherent(), path)
        with open(path, 'rb') as f:
            data = f.read()
        with open(path, 'wb') as f:
            f.write(data[:-8])
        with self.assertRaises(ValueError):
            read_grid_snapshot(path)

    def test_ensemble_snapshot(self):
        ens = sample_coherent_ensemble((1.0, 0.0), 0.3, 10 ** 4, 11)
        path = os.path.join(self.output_dir, 'ensemble.bin')
        write_ensemble_snapshot(ens, path)
        loaded, parameters = read_ensemble_snapshot(path)
        self.assertTrue(np.array_equal(loaded.q, ens.q))
        self.assertTrue(np.array_equal(loaded.p, ens.p))
        self.assertEqual((loaded.rng_seed, loaded.kicks), (11, 0))
        self.assertEqual(parameters, {})

    def test_ensemble_is_not_a_grid(self):
        path = os.path.join(self.output_dir, 'ensemble.bin')
        write_ensemble_snapshot(sample_coherent_ensemble((0.0, 0.0), 0.3, 10 ** 4, 0), path)
        with self.assertRaises(ValueError):
            read_grid_snapshot(path)


class TestTables(TemporaryOutputMixin, SimpleTestCase):
    def test_table(self):
        path = os.path.join(self.output_dir, 'table.csv')
        write_table_csv(path, ('eta', 'n_peak'), [(0.1, 4), (0.04, 5)], {'fit': {'slope': 1.45}})
        metadata, header, rows = read_table_csv(path)
        self.assertEqual(metadata, {'fit': {'slope': 1.45}})
        self.assertEqual(header, ['eta', 'n_peak'])
        self.assertEqual(rows, [['0.1', '4'], ['0.04', '5']])

    def test_series(self):
        series = DistanceSeries(SystemParams(K=2.0, eta=0.04), DecoherenceParams(D=4.5e-3))
        for n, value in enumerate((0.0, 0.0123456789012345, 1 / 3)):
            series.append(DistanceRecord(n, value, 1.0, 1.0 - 1e-13, 0.0))
        path = os.path.join(self.output_dir, 'series.csv')
        write_series_csv(series, path, config={'scenario': 'fig2'})
        metadata, records = read_series_csv(path)
        self.assertEqual(records, series.records)
        self.assertEqual(metadata['params']['K'], 2.0)
        self.assertAlmostEqual(metadata['chi'], series.chi)
        self.assertEqual(metadata['config'], {'scenario': 'fig2'})
        with open(path) as f:
            self.assertIn('n,D_n,norm_q,norm_cl,negativity', f.read())


class TestHeatmap(TemporaryOutputMixin, GridTestMixin, SimpleTestCase):
    def test_zero_grid(self):
        grid = self._constant(0.0)
        self.assertTrue(np.all(heatmap_pixels(grid, SIGNED) == 255))
        self.assertTrue(np.all(heatmap_pixels(grid, UNSIGNED) == 0))

    def test_orientation(self):
        pixels = heatmap_pixels(self._coherent(), UNSIGNED)
        self.assertEqual(pixels.shape, (128, 128, 3))
        row, column = np.unravel_index(np.argmax(pixels[:, :, 0]), pixels.shape[:2])
        # q = 0 is column 64, p = 0 is row 63 counted from the top
        self.assertEqual((row, column), (63, 64))
        self.assertEqual(pixels[row, column].tolist(), [255, 255, 255])

    def test_signed_colors(self):
        pixels = heatmap_pixels(new_cat_state(self._spec(n=256), 2.0, 0.25), SIGNED).astype(int)
        red = (pixels[:, :, 0] == 255) & (pixels[:, :, 2] < 128)
        blue = (pixels[:, :, 2] == 255) & (pixels[:, :, 0] < 128)
        self.assertTrue(red.any())
        self.assertTrue(blue.any())

    def test_unknown_palette(self):
        with self.assertRaises(ValueError):
            heatmap_pixels(self._coherent(), 'rainbow')

    def test_write(self):
        grid = self._coherent()
        path = os.path.join(self.output_dir, 'heatmap.ppm')
        write_heatmap(grid, path, UNSIGNED, comment='kick 3\nquantum')
        pixels, comments = read_ppm(path)
        self.assertTrue(np.array_equal(pixels, heatmap_pixels(grid, UNSIGNED)))
        self.assertEqual(comments, ['kick 3 quantum'])

    def test_not_a_pixmap(self):
        path = os.path.join(self.output_dir, 'image.pgm')
        with open(path, 'wb') as f:
            f.write(b'P5\n2 2\n255\n\x00\x00\x00\x00')
        with self.assertRaises(ValueError):
            read_ppm(path)


class TestManifest(TemporaryOutputMixin, GridTestMixin, SimpleTestCase):
    def _artifact(self, name='grid.bin'):
        path = os.path.join(self.output_dir, name)
        write_grid_snapshot(self._coherent(), path)
        return path

    def test_add(self):
        manifest = Manifest(self.output_dir, 'custom')
        entry = manifest.add(self._artifact(), 'snapshot', {'n': 0})
        self.assertEqual(entry['path'], 'grid.bin')
        self.assertEqual(entry['scenario'], 'custom')
        self.assertEqual(len(entry['checksum']), 32)
        self.assertIn('grid.bin', manifest)
        self.assertEqual(len(manifest), 1)

    def test_duplicate(self):
        manifest = Manifest(self.output_dir, 'custom')
        path = self._artifact()
        manifest.add(path, 'snapshot')
        with self.assertRaises(ValueError):
            manifest.add(path, 'snapshot')

    def test_unknown_kind(self):
        with self.assertRaises(ValueError):
            Manifest(self.output_dir, 'custom').add(self._artifact(), 'movie')

    def test_save_load(self):
        manifest = Manifest(self.output_dir, 'fig1', {'n_kicks': 3})
        manifest.add(self._artifact('a.bin'), 'snapshot')
        manifest.add(self._artifact('b.bin'), 'snapshot')
        path = manifest.save()
        self.assertTrue(os.path.exists(path))
        loaded = Manifest.load(self.output_dir)
        self.assertEqual(loaded.scenario, 'fig1')
        self.assertEqual(loaded.config, {'n_kicks': 3})
        self.assertEqual([a['path'] for a in loaded], ['a.bin', 'b.bin'])
        self.assertEqual(loaded.verify(), [])

    def test_verify_tampered(self):
        manifest = Manifest(self.output_dir, 'custom')
        manifest.add(self._artifact('a.bin'), 'snapshot')
        manifest.add(self._artifact('b.bin'), 'snapshot')
        with open(os.path.join(self.output_dir, 'a.bin'), 'ab') as f:
            f.write(b'\x00')
        os.remove(os.path.join(self.output_dir, 'b.bin'))
        self.assertEqual(manifest.verify(), ['a.bin', 'b.bin'])
