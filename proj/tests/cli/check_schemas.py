#!/usr/bin/env python3
"""Runs every lumigeo command once and validates its JSON line against the
shipped schema. Usage: check_schemas.py <lumigeo exe> <schemas dir> <tmp dir>"""

import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema

exe, schema_dir, tmp = str(pathlib.Path(sys.argv[1]).resolve()), pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
shutil.rmtree(tmp, ignore_errors=True)
tmp.mkdir(parents=True)

schemas = {}
for path in sorted(schema_dir.glob("*.schema.json")):
    schema = json.loads(path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    schemas[path.name[: -len(".schema.json")]] = schema

used = set()
failures = []


def run(schema, *args, exit_code=0, report=None):
    proc = subprocess.run([exe, *args], cwd=tmp, capture_output=True, text=True)
    label = " ".join(args[:2])
    lines = proc.stdout.splitlines()
    if proc.returncode != exit_code:
        failures.append(f"{label}: exit {proc.returncode}, expected {exit_code}\n{proc.stdout}{proc.stderr}")
        return None
    if len(lines) != 1:
        failures.append(f"{label}: expected one stdout line, got {len(lines)}")
        return None
    docs = [json.loads(lines[0])]
    if report:
        docs.append(json.loads((tmp / report).read_text()))
    used.add(schema)
    for doc in docs:
        try:
            jsonschema.validate(doc, schemas[schema], cls=jsonschema.Draft202012Validator)
        except jsonschema.ValidationError as e:
            failures.append(f"{label}: {e.message} at {list(e.absolute_path)}")
    return docs[0]


run("synth-scene", "synth", "scene", "--out", "d.pfm", "--shape", "box", "--projection", "far", "--seed", "3")
run("synth-scene", "synth", "scene", "--out", "n.pfm", "--shape", "capsule-stack", "--dh", "0.3")
run("inod-encode", "inod", "encode", "--depth", "d.pfm", "--mask", "d.pgm", "--intrinsics", "d.json", "--out", "m.pfm")
run("inod-dilate", "inod", "dilate", "--map", "m.pfm", "--mask", "m.mask.pgm", "--meta", "m.json", "--out", "md.pfm")
run("inod-decode", "inod", "decode", "--map", "m.pfm", "--mask", "m.mask.pgm", "--meta", "m.json", "--out", "c.ply")
run("inod-decode", "inod", "decode", "--map", "m.pfm", "--mask", "m.mask.pgm", "--out", "cf.ply")
run("inod-decode", "inod", "decode", "--map", "m.pfm", "--mask", "m.mask.pgm", "--meta", "m.json", "--out", "cm.ply",
    "--metric")
run("inod-roundtrip", "inod", "roundtrip", "--depth", "n.pfm", "--intrinsics", "n.json", "--out", "rt.json",
    report="rt.json")

(tmp / "leds.json").write_text(json.dumps(
    [{"position": [1, 0, 0], "intensity": 2.0}, {"position": [0, 1, 0.5], "intensity": 1.0}]))
run("envmap-from-leds", "envmap", "from-leds", "--leds", "leds.json", "--size", "64x32", "--out", "e.pfm")
run("envmap-decompose", "envmap", "decompose", "--hdr", "e.pfm", "--out-dir", "dec")
run("envmap-rotate", "envmap", "rotate", "--hdr", "e.pfm", "--yaw", "1.25", "--out", "r.pfm")
run("envmap-scale", "envmap", "scale", "--hdr", "e.pfm", "--factor", "2", "--out", "s.hdr")

run("sample", "sample", "--latent-size", "4x3", "--mode", "Default", "--dataset", "Synth", "--seed", "3",
    "--out", "lat.grlt")
run("sample", "sample", "--latents", "lat.grlt", "--clear", "a,n", "--steps", "4", "--denoiser", "identity",
    "--out", "lat2.grlt")
run("assemble", "assemble", "--latents", "lat.grlt", "--mode", "RelitToGeometry", "--out", "st.grlt")
run("assemble", "assemble", "--latents", "lat.grlt", "--clear", "g", "--out", "st2.grlt")

run("eval-geometry", "eval", "geometry", "--pred", "c.ply", "--gt", "cf.ply", "--out", "g.json", report="g.json")
run("eval-relight", "eval", "relight", "--pred", "r.pfm", "--gt", "e.pfm", "--out", "rl.json", report="rl.json")
run("eval-relight", "eval", "relight", "--pred", "e.pfm", "--gt", "e.pfm", "--no-align")
run("eval-normal", "eval", "normal", "--pred", "dec/dir.pfm", "--gt", "dec/dir.pfm", "--out", "nm.json",
    report="nm.json")
run("bench-dilation", "bench", "dilation", "--generate", "4", "--seed", "2", "--save-corpus", "corpus",
    "--out", "bd.json", report="bd.json")
run("bench-dilation", "bench", "dilation", "--corpus", "corpus", "--radius", "1")

(tmp / "manifest.json").write_text(json.dumps({"schema_version": 1, "jobs": [
    {"command": "synth scene", "outputs": {"out": "q.pfm"}, "params": {"shape": "sphere"}, "seed": 4},
    {"command": "inod roundtrip", "inputs": {"depth": "q.pfm", "intrinsics": "q.json"}},
]}))
doc = run("manifest-run", "manifest", "run", "--manifest", "manifest.json")
if doc:
    nested = {"synth scene": "synth-scene", "inod roundtrip": "inod-roundtrip"}
    for job in doc["jobs"]:
        jsonschema.validate(job["result"], schemas[nested[job["command"]]])
(tmp / "bad_manifest.json").write_text(json.dumps({"jobs": [{"command": "inod roundtrip",
                                                             "inputs": {"depth": "missing.pfm", "intrinsics": "q.json"}}]}))
run("manifest-run", "manifest", "run", "--manifest", "bad_manifest.json", exit_code=2)

# Error lines: usage, validation and I/O.
run("error", "inod", "encode", "--bogus", exit_code=1)
run("error", "envmap", "scale", "--hdr", "e.pfm", "--factor", "-1", "--out", "x.pfm", exit_code=1)
run("error", "assemble", "--latents", "lat.grlt", "--mode", "RelitToGeometry", "--dataset", "ITW", "--out", "x.grlt",
    exit_code=1)
run("error", "eval", "geometry", "--pred", "missing.ply", "--gt", "c.ply", exit_code=2)

missing = sorted(set(schemas) - used)
if missing:
    failures.append("schemas never exercised: " + ", ".join(missing))
for f in failures:
    print("FAIL", f)
print(f"{len(schemas)} schemas, {len(failures)} failures")
sys.exit(1 if failures else 0)
