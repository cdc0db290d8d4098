from django.test import SimpleTestCase

from ..validation import Check, check_chi_pairs, check_f_envelope, collapse_pair_chis, run_validation


class TestValidation(SimpleTestCase):
    def test_quick_suite(self):
        checks = run_validation()
        self.assertEqual(len(checks), 9)
        for check in checks:
            self.assertIsInstance(check, Check)
            self.assertTrue(check.passed,
                            '{0}: {1:.3e} > {2:.3e}'.format(check.name, check.value, check.bound))

    def test_constant_checks(self):
        self.assertTrue(check_f_envelope().passed)
        self.assertTrue(check_chi_pairs().passed)

    def test_collapse_pair_chis(self):
        chis = collapse_pair_chis()
        self.assertEqual(len(chis), 7)
        self.assertEqual([round(value, 3) for _, _, value in chis[:3]], [0.017, 0.017, 0.017])
