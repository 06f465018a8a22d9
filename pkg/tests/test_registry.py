"""The shipped example suites all pass and report sensibly."""

import pytest

from jetflux.errors import DocumentError
from jetflux.registry import (document, document_path, example_names,
                              run_all, run_example)


def test_every_suite_passes():
    results = run_all()
    assert [name for name, _ in results] == sorted(example_names())
    for name, rep in results:
        assert rep.passed, f"{name}: {rep.to_text()}"
        assert not rep.necessary_only
        assert rep.checks  # no vacuous suites


def test_single_suite_matches_the_batch():
    batch = dict(run_all())
    one = run_example("gkdv")
    assert [c.name for c in one.checks] == \
        [c.name for c in batch["gkdv"].checks]


def test_unknown_example_is_rejected_with_the_known_names():
    with pytest.raises(DocumentError, match="gkdv"):
        run_example("kdv")


def test_document_path_points_at_a_shipped_file():
    path = document_path("kg-w")
    assert path.is_file()
    with pytest.raises(DocumentError, match="kg-w"):
        document_path("kg-z")


def test_documents_are_cached_per_name():
    assert document("gkdv") is document("gkdv")
