import contextlib
import csv
import io
import os
import tempfile
import unittest
from typing import Dict, List, Sequence, Tuple
from unittest import mock

from fairopt.cli import CSV_FIELDS, gap, run
from fairopt.errors import ValidationError
from fairopt.ggi import WeightVector
from fairopt.instance_file import read_instance, write_instance
from fairopt.instances import Instance, gen_assignment
from fairopt.oracle import format_ip


def _run(argv: Sequence[str]) -> Tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stderr(err):
        code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def _rows(text: str) -> List[Dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


class CliTestCase(unittest.TestCase):
    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.tmp = self._tmp.name

    def path(self, name: str) -> str:
        return os.path.join(self.tmp, name)

    def tiny(self) -> str:
        path = self.path("tiny.inst")
        write_instance(Instance("assignment", 2, [[5, 1], [2, 3]]), path)
        return path


class GenTest(CliTestCase):
    def test_default_name(self) -> None:
        cwd = os.getcwd()
        os.chdir(self.tmp)
        self.addCleanup(os.chdir, cwd)
        code, out, _ = _run(
            ["gen", "--kind", "assignment", "--n", "10", "--d", "50", "--seed", "7"]
        )
        self.assertEqual(code, 0)
        self.assertEqual(out, "v50-20.inst\n")
        self.assertEqual(read_instance("v50-20.inst"), gen_assignment(10, 50, 7))

    def test_output_flag(self) -> None:
        path = self.path("m.inst")
        argv = ["gen", "--kind", "matching", "--n", "3", "--d", "0", "--seed", "1"]
        code, out, _ = _run(argv + ["-o", path])
        self.assertEqual(code, 0)
        self.assertEqual(out, path + "\n")
        self.assertEqual(read_instance(path).kind, "matching")


class SolveTest(CliTestCase):
    def generated(self) -> str:
        path = self.path("g.inst")
        write_instance(gen_assignment(6, 30, 3), path)
        return path

    def test_stdout_row(self) -> None:
        code, out, _ = _run(["solve", self.generated(), "--max-iter", "40"])
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], ",".join(CSV_FIELDS))
        rows = _rows(out)
        self.assertEqual(len(rows), 1)
        row = rows[0]
        self.assertEqual(row["instance"], "v30-12")
        self.assertEqual((row["kind"], row["n"], row["d"]), ("assignment", "6", "30"))
        self.assertEqual(row["seed"], "3")
        self.assertEqual((row["init"], row["sign"]), ("rank-based", "standard"))
        self.assertEqual(row["gap_vs_exact"], "")
        self.assertIn(row["certificate"], ("true", "false"))
        self.assertLessEqual(float(row["best_ggi"]), float(row["upper_bound"]) + 1e-6)
        self.assertGreaterEqual(float(row["gap_vs_ub"]), -1e-6)

    def test_exact_gap(self) -> None:
        argv = ["solve", self.generated(), "--max-iter", "40", "--exact"]
        code, out, _ = _run(argv + ["--init", "rank-based", "--sign", "descent"])
        self.assertEqual(code, 0)
        row = _rows(out)[0]
        self.assertEqual((row["init"], row["sign"]), ("rank-based", "descent"))
        self.assertGreaterEqual(float(row["gap_vs_exact"]), -1e-9)

    def test_file_name_label(self) -> None:
        code, out, _ = _run(["solve", self.tiny(), "--weights", "1,0.25"])
        self.assertEqual(code, 0)
        row = _rows(out)[0]
        self.assertEqual((row["instance"], row["d"], row["seed"]), ("tiny", "", ""))
        self.assertEqual(float(row["best_ggi"]), 4.25)

    def test_csv_append(self) -> None:
        out_path = self.path("results.csv")
        argv = ["solve", self.generated(), "--max-iter", "20", "--csv", out_path]
        for _ in range(2):
            code, out, _ = _run(argv)
            self.assertEqual(code, 0)
            self.assertEqual(out, "")
        with open(out_path, encoding="utf-8") as f:
            text = f.read()
        self.assertEqual(text.count("instance,kind"), 1)
        self.assertEqual(len(_rows(text)), 2)


class ExactAndExportTest(CliTestCase):
    def test_exact(self) -> None:
        code, out, _ = _run(["exact", self.tiny(), "--weights", "1,0.25"])
        self.assertEqual(code, 0)
        self.assertEqual(
            out, "instance tiny\nggi 4.25\nsolution 1->1 2->2\nvalues 5 3\n"
        )

    def test_exact_matching(self) -> None:
        path = self.path("m.inst")
        argv = ["gen", "--kind", "matching", "--n", "2", "--d", "0", "--seed", "4"]
        self.assertEqual(_run(argv + ["-o", path])[0], 0)
        code, out, _ = _run(["exact", path])
        self.assertEqual(code, 0)
        self.assertRegex(out.splitlines()[2], r"^solution \d-\d \d-\d$")

    def test_export_stdout_and_file(self) -> None:
        expected = format_ip(
            Instance("assignment", 2, [[5, 1], [2, 3]]), WeightVector([1, 0.25])
        )
        code, out, _ = _run(["export-lp", self.tiny(), "--weights", "1,0.25"])
        self.assertEqual(code, 0)
        self.assertEqual(out, expected)
        lp = self.path("tiny.lp")
        code, out, _ = _run(["export-lp", self.tiny(), "--weights", "1,0.25", "-o", lp])
        self.assertEqual((code, out), (0, ""))
        with open(lp, encoding="utf-8") as f:
            self.assertEqual(f.read(), expected)


class BenchTest(CliTestCase):
    fast = ["--max-iter", "5", "--no-exact"]

    def test_grid(self) -> None:
        argv = ["bench", "--kind", "assignment", "--sizes", "8,10,12"]
        argv += ["--d", "10,30,50", "--reps", "10"] + self.fast
        code, out, _ = _run(argv)
        self.assertEqual(code, 0)
        rows = _rows(out)
        self.assertEqual(len(rows), 90)
        self.assertEqual([r["n"] for r in rows[:11]], ["8"] * 11)
        self.assertEqual([r["d"] for r in rows[9:11]], ["10", "30"])
        self.assertEqual(rows[0]["seed"], "0")
        self.assertEqual(rows[-1]["seed"], "89")
        self.assertEqual(rows[-1]["instance"], "v50-24")

    def test_deterministic(self) -> None:
        argv = ["bench", "--kind", "matching", "--sizes", "2,3", "--d", "20"]
        argv += ["--reps", "2", "--seed", "11", "--max-iter", "10"]

        def strip(text: str) -> List[Dict[str, str]]:
            rows = _rows(text)
            for row in rows:
                del row["time_ms"]
            return rows

        first = strip(_run(argv)[1])
        self.assertEqual(len(first), 4)
        self.assertEqual(strip(_run(argv)[1]), first)
        self.assertEqual(strip(_run(argv + ["--threads", "2"])[1]), first)
        self.assertTrue(any(row["gap_vs_exact"] != "" for row in first))

    def test_csv_file(self) -> None:
        out_path = self.path("bench.csv")
        argv = ["bench", "--kind", "matching", "--sizes", "2", "--d", "0"]
        code, out, _ = _run(argv + ["--reps", "3", "--csv", out_path] + self.fast)
        self.assertEqual((code, out), (0, ""))
        with open(out_path, encoding="utf-8") as f:
            self.assertEqual(len(_rows(f.read())), 3)


class ExitCodeTest(CliTestCase):
    def test_usage_errors(self) -> None:
        self.assertEqual(_run(["solve", self.tiny(), "--bogus"])[0], 2)
        self.assertEqual(_run([])[0], 2)
        self.assertEqual(_run(["bench", "--kind", "assignment", "--sizes", "x"])[0], 2)
        code, _, err = _run(["solve", self.tiny(), "--weights", "1,2"])
        self.assertEqual(code, 2)
        self.assertIn("strictly decreasing", err)
        self.assertEqual(_run(["exact", self.tiny(), "--weights", "bogus"])[0], 2)
        self.assertEqual(_run(["solve", self.tiny(), "--max-iter", "0"])[0], 2)
        argv = ["bench", "--kind", "assignment", "--sizes", "2", "--d", "0"]
        self.assertEqual(_run(argv + ["--reps", "0"])[0], 2)
        self.assertEqual(_run(argv + ["--threads", "0"])[0], 2)

    def test_threads_env(self) -> None:
        argv = ["bench", "--kind", "assignment", "--sizes", "2", "--d", "0"]
        with mock.patch.dict(os.environ, {"FAIROPT_THREADS": "many"}):
            code, out, err = _run(argv + ["--reps", "1"])
        self.assertEqual((code, out), (2, ""))
        self.assertIn("FAIROPT_THREADS", err)

    def test_unreadable_instance(self) -> None:
        code, _, err = _run(["solve", self.path("missing.inst")])
        self.assertEqual(code, 1)
        self.assertIn("fairopt solve", err)
        bad = self.path("bad.inst")
        with open(bad, "w", encoding="utf-8") as f:
            f.write("fairopt-instance v1\nkind tsp\n")
        code, _, err = _run(["exact", bad])
        self.assertEqual(code, 1)
        self.assertIn("line 2", err)

    def test_malformed_bytes_and_overflow(self) -> None:
        bad = self.path("bytes.inst")
        with open(bad, "wb") as f:
            f.write(b"fairopt-instance v1\nkind assignment\nn 1\nu\n\xff\n")
        code, out, err = _run(["solve", bad])
        self.assertEqual((code, out), (1, ""))
        self.assertIn("line 5", err)
        huge = self.path("huge.inst")
        with open(huge, "w", encoding="utf-8") as f:
            f.write("fairopt-instance v1\nkind assignment\nn 1\nu\n")
            f.write("99999999999999999999999\n")
        code, out, err = _run(["solve", huge])
        self.assertEqual((code, out), (1, ""))
        self.assertIn("int64 range", err)

    def test_capacity(self) -> None:
        path = self.path("big.inst")
        write_instance(gen_assignment(9, 10, 1), path)
        code, out, err = _run(["exact", path])
        self.assertEqual((code, out), (3, ""))
        self.assertIn("exceeds the cap", err)


class GapTest(unittest.TestCase):
    def test_examples(self) -> None:
        self.assertAlmostEqual(gap(100, 99.7), 0.3)
        self.assertEqual(gap(100, 0), 100.0)
        self.assertEqual(gap(50, 60), -20.0)
        self.assertEqual(gap(8, 8), 0.0)

    def test_non_positive_reference(self) -> None:
        for opt in [0, -5]:
            with self.assertRaises(ValidationError):
                gap(opt, 1)
