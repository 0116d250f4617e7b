import os
import tempfile
import unittest

from fairopt.errors import InstanceParseError, ValidationError
from fairopt.instance_file import dumps, loads, read_instance, write_instance
from fairopt.instances import Instance, Provenance, gen_assignment, gen_matching

MATCHING = """\
fairopt-instance v1
kind matching
n 2
vertices 4
provenance d=0 seed=7
u
-1000 57 57
41 41
12
"""


class InstanceFileTest(unittest.TestCase):
    def assertParseError(self, text: str, line: int, fragment: str = "") -> None:
        with self.assertRaises(InstanceParseError) as ctx:
            loads(text)
        self.assertEqual(ctx.exception.line, line)
        self.assertIn(fragment, ctx.exception.msg)

    def test_matching(self) -> None:
        inst = loads(MATCHING)
        self.assertEqual(inst.kind, "matching")
        self.assertEqual(inst.n, 2)
        self.assertEqual(inst.provenance, Provenance(0, 7))
        self.assertEqual(inst.u[0].tolist(), [0, -1000, 57, 57])
        self.assertEqual(inst.u[1, 2:].tolist(), [41, 41])
        self.assertEqual(inst.u[2, 3], 12)
        self.assertEqual(dumps(inst), MATCHING)

    def test_assignment_without_provenance(self) -> None:
        text = "fairopt-instance v1\nkind assignment\nn 2\nu\n5 1\n2 3\n"
        inst = loads(text)
        self.assertEqual(inst, Instance("assignment", 2, [[5, 1], [2, 3]]))
        self.assertEqual(dumps(inst), text)

    def test_generated_instances_survive_a_file(self) -> None:
        for inst in [gen_assignment(6, 50, 3), gen_matching(4, 30, 3)]:
            self.assertEqual(loads(dumps(inst)), inst)

    def test_trailing_blank_lines_and_missing_newline(self) -> None:
        text = "fairopt-instance v1\nkind assignment\nn 1\nu\n4"
        self.assertEqual(loads(text).u.tolist(), [[4]])
        self.assertEqual(loads(text + "\n\n\n").u.tolist(), [[4]])

    def test_unsupported_kind(self) -> None:
        self.assertParseError(
            "fairopt-instance v1\nkind tsp\nn 2\nu\n1 2\n3 4\n", 2, "tsp"
        )

    def test_unsupported_version(self) -> None:
        self.assertParseError(
            "fairopt-instance v2\nkind assignment\nn 1\nu\n4\n", 1, "version"
        )

    def test_truncated_row(self) -> None:
        self.assertParseError(
            "fairopt-instance v1\nkind assignment\nn 2\nu\n1 2\n3\n",
            6,
            "utility row 2",
        )

    def test_missing_rows(self) -> None:
        self.assertParseError(
            "fairopt-instance v1\nkind assignment\nn 2\nu\n1 2\n",
            5,
            "expected 2 utility rows, got 1",
        )

    def test_missing_utility_header(self) -> None:
        self.assertParseError(
            "fairopt-instance v1\nkind assignment\nn 2\n1 2\n3 4\n", 4
        )

    def test_matching_needs_vertices(self) -> None:
        self.assertParseError(
            "fairopt-instance v1\nkind matching\nn 1\nu\n5\n", 4, "vertices"
        )
        self.assertParseError(
            "fairopt-instance v1\nkind matching\nn 1\nvertices 4\nu\n5\n",
            4,
            "expected 2 vertices",
        )
        self.assertParseError(
            "fairopt-instance v1\nkind assignment\nn 1\nvertices 2\nu\n5\n",
            4,
            "only valid for matching",
        )

    def test_bad_characters(self) -> None:
        self.assertParseError(
            "fairopt-instance v1\nkind assignment\nn 1\nu\n4.5\n", 5
        )

    def test_non_positive_size(self) -> None:
        self.assertParseError("fairopt-instance v1\nkind assignment\nn 0\nu\n", 3)

    def test_negative_provenance(self) -> None:
        self.assertParseError(
            "fairopt-instance v1\nkind assignment\nn 1\nprovenance d=-1 seed=2\nu\n4\n",
            4,
            "non-negative",
        )

    def test_utility_out_of_int64_range(self) -> None:
        header = "fairopt-instance v1\nkind assignment\nn 2\nu\n"
        self.assertParseError(
            header + "1 2\n3 99999999999999999999999\n", 6, "int64 range"
        )
        inst = loads(header + "1 2\n3 9223372036854775807\n")
        self.assertEqual(int(inst.u[1, 1]), 9223372036854775807)
        self.assertParseError(
            MATCHING.replace("41 41", "41 -99999999999999999999"), 8, "int64 range"
        )

    def test_file_not_utf8(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "bad.inst")
            with open(path, "wb") as f:
                f.write(b"fairopt-instance v1\nkind assignment\nn 1\nu\n\xff\n")
            with self.assertRaises(InstanceParseError) as ctx:
                read_instance(path)
        self.assertEqual(ctx.exception.line, 5)
        self.assertIn("UTF-8", ctx.exception.msg)

    def test_files(self) -> None:
        inst = gen_matching(3, 10, 5)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "v10-6.inst")
            write_instance(inst, path)
            self.assertEqual(read_instance(path), inst)

    def test_rectangular_assignment_cannot_be_written(self) -> None:
        with self.assertRaises(ValidationError):
            dumps(Instance("assignment", 1, [[1, 2]]))
