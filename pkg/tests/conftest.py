"""Shared corpus fixtures.

The 60-case manifest takes a few seconds per pass, and both the batch
suite and the acceptance suite need the same two passes (the harness
run and a direct generate() run), so they are computed once per session
here rather than once per module.
"""

import json
from pathlib import Path

import pytest

from rampgen.cli import run_batch_cases
from rampgen.params import params_from_overrides
from rampgen.pipeline import generate

MANIFEST = Path(__file__).resolve().parent.parent / "manifests" / "batch60.json"


@pytest.fixture(scope="session")
def manifest():
    return json.loads(MANIFEST.read_text())


@pytest.fixture(scope="session")
def batch_harness(manifest, tmp_path_factory):
    out = tmp_path_factory.mktemp("batch_out")
    return run_batch_cases(manifest["cases"], MANIFEST.parent, out), out


@pytest.fixture(scope="session")
def batch_generations(manifest):
    out = []
    for case in manifest["cases"]:
        if "env" in case:
            env_text = json.dumps(case["env"])
        else:
            env_text = (MANIFEST.parent / case["env_file"]).read_text()
        params = params_from_overrides(case.get("params"))
        out.append((case, env_text, params, generate(env_text, params)))
    return out
