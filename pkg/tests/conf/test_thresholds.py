import unittest
from unittest.mock import patch

from src.conf.config import Settings
from src.conf.thresholds import Thresholds


class TestThresholds(unittest.TestCase):

    def test_override(self):
        th = Thresholds().override(["tamper=0.5", "nm2=0.25"])
        self.assertEqual(th.tamper, 0.5)
        self.assertEqual(th.nm2, 0.25)
        self.assertEqual(th.snm, Thresholds().snm)

    def test_unknown_or_empty_override(self):
        with self.assertRaises(ValueError):
            Thresholds().override(["nipm=0.1"])
        with self.assertRaises(ValueError):
            Thresholds().override(["tamper="])
        with self.assertRaises(ValueError):
            Thresholds().override(["tamper=high"])


class TestSettings(unittest.TestCase):

    def test_environment_prefix(self):
        with patch.dict("os.environ", {"EXFORGE_THREADS": "4", "EXFORGE_LOG_LEVEL": "DEBUG"}):
            settings = Settings(_env_file=None)
        self.assertEqual(settings.THREADS, 4)
        self.assertEqual(settings.LOG_LEVEL, "DEBUG")

    def test_defaults(self):
        with patch.dict("os.environ", {}, clear=True):
            settings = Settings(_env_file=None)
        self.assertEqual(settings.ENUMERATION_BUDGET, 2 ** 26)
        self.assertEqual(settings.CERTIFY_BITS, 20)
        self.assertEqual(settings.CONST_C_PRIME, 16)


if __name__ == '__main__':
    unittest.main()
