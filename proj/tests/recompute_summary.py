"""End-to-end check of the frl CLI.

Runs `frl run` and `frl compare`, then recomputes every summary statistic
from steps.csv with plain Python and compares against summary.json.

usage: recompute_summary.py FRL_BINARY DATA_DIR WORK_DIR
"""
import csv
import json
import math
import os
import subprocess
import sys

TOL = 1e-9


def fail(msg):
    print("FAIL:", msg)
    sys.exit(1)


def run(cli, *args, env=None):
    proc = subprocess.run([cli, *args], capture_output=True, text=True, env=env)
    return proc.returncode, proc.stdout, proc.stderr


def read_steps(path):
    with open(path, newline="") as f:
        raw = f.read()
    if "\r\n" not in raw or raw.replace("\r\n", "").count("\n"):
        fail(f"{path}: expected CRLF line endings throughout")
    rows = list(csv.DictReader(raw.splitlines()))
    return [{k: float(v) for k, v in r.items()} for r in rows]


def close(a, b):
    return abs(a - b) <= TOL * max(1.0, abs(b))


def phase(rows, sla, vm_max):
    n = len(rows)
    rts = sorted(r["rt"] for r in rows)
    rank = max(1, math.ceil(0.95 * n))
    return {
        "intervals": n,
        "mean_rt_s": sum(r["rt"] for r in rows) / n,
        "p95_rt_s": rts[rank - 1],
        "sla_violation_ratio": sum(r["rt"] > sla for r in rows) / n,
        "mean_vm_pct": 100.0 * sum(r["vm_active"] for r in rows) / (n * vm_max),
    }


def check_run(out_dir):
    cfg = json.load(open(os.path.join(out_dir, "config.json")))
    summary = json.load(open(os.path.join(out_dir, "summary.json")))
    steps = read_steps(os.path.join(out_dir, "steps.csv"))
    sla = cfg["reward"]["sla_rt"]
    vm_min, vm_max = cfg["reward"]["vm_min"], cfg["reward"]["vm_max"]
    warmup = cfg["warmup"]

    if len(steps) != cfg["horizon"] or summary["intervals"] != len(steps):
        fail(f"{out_dir}: {len(steps)} rows for horizon {cfg['horizon']}")
    if [int(r["t"]) for r in steps] != list(range(len(steps))):
        fail(f"{out_dir}: t column is not 0..n-1")

    kept = steps[warmup:]
    expect = phase(kept, sla, vm_max)
    expect["scale_ups"] = int(sum(max(0, r["action_applied"]) for r in kept))
    expect["scale_downs"] = int(sum(max(0, -r["action_applied"]) for r in kept))
    expect["cumulative_reward"] = sum(r["reward"] for r in kept)
    for key, value in expect.items():
        if key == "intervals":
            continue
        if not close(summary[key], value):
            fail(f"{out_dir}: {key} = {summary[key]}, recomputed {value}")

    hist = {str(v): 0 for v in range(vm_min, vm_max + 1)}
    for r in kept:
        hist[str(int(r["vm_active"]))] += 1
    if summary["vm_histogram"] != hist:
        fail(f"{out_dir}: vm_histogram {summary['vm_histogram']} != {hist}")

    # Reward per row from the formula.
    for r in steps:
        perf = min(1.0, max(-1.0, (sla - r["rt"]) / sla))
        reward = perf - cfg["reward"]["cost_weight"] * (r["vm_active"] - vm_min) / (vm_max - vm_min)
        if not close(r["reward"], reward):
            fail(f"{out_dir}: reward at t={int(r['t'])} is {r['reward']}, formula gives {reward}")

    learned = cfg["controller"] in ("FSL", "FQL")
    conv = None
    if learned:
        delta = cfg["agent"]["convergence_delta"]
        window = cfg["agent"]["convergence_window"]
        streak = 0
        for r in steps[1:]:
            streak = streak + 1 if r["q_delta_max"] < delta else 0
            if streak >= window:
                conv = int(r["t"])
                break
    if summary["convergence_step"] != conv:
        fail(f"{out_dir}: convergence_step {summary['convergence_step']}, recomputed {conv}")
    if conv is not None and conv + 1 < len(steps):
        post = phase(steps[conv + 1:], sla, vm_max)
        for key, value in post.items():
            if not close(summary["post_convergence"][key], value):
                fail(f"{out_dir}: post_convergence.{key} = {summary['post_convergence'][key]}, recomputed {value}")
    return summary, cfg


def main():
    cli, data, work = sys.argv[1:4]
    os.makedirs(work, exist_ok=True)
    env = {k: v for k, v in os.environ.items() if k != "FRL_SEED"}

    out = os.path.join(work, "run")
    code, stdout, stderr = run(cli, "run", "--config", os.path.join(data, "cli_fql.json"), "--out", out, env=env)
    if code != 0:
        fail(f"run exited {code}: {stderr}")
    summary, cfg = check_run(out)
    if summary["convergence_step"] is None:
        fail("expected the loose convergence threshold to fire")
    for name in ("qtable_t000500.json", "qtable_t001000.json", "qtable_final.json", "rt.dat"):
        if not os.path.exists(os.path.join(out, name)):
            fail(f"missing {name}")
    print("run: summary recomputed from steps.csv, convergence_step", summary["convergence_step"])

    # Seed precedence: config < --seed < FRL_SEED.
    a, b = os.path.join(work, "seed_flag"), os.path.join(work, "seed_env")
    run(cli, "run", "--config", os.path.join(data, "cli_fql.json"), "--out", a, "--seed", "99", env=env)
    run(cli, "run", "--config", os.path.join(data, "cli_fql.json"), "--out", b, "--seed", "5",
        env=dict(env, FRL_SEED="99"))
    if json.load(open(os.path.join(a, "config.json")))["seed"] != 99:
        fail("--seed did not override the config seed")
    if open(os.path.join(a, "steps.csv"), "rb").read() != open(os.path.join(b, "steps.csv"), "rb").read():
        fail("FRL_SEED did not take precedence over --seed")
    print("seed precedence: ok")

    code, _, stderr = run(cli, "run", "--config", os.path.join(data, "missing.json"), env=env)
    if code == 0 or "frl:" not in stderr:
        fail("missing config should fail with a message")

    cmp_dir = os.path.join(work, "compare")
    code, stdout, stderr = run(cli, "compare", "--config", os.path.join(data, "cli_compare.json"), "--out", cmp_dir,
                               env=env)
    if code != 0:
        fail(f"compare exited {code}: {stderr}")
    with open(os.path.join(cmp_dir, "comparison.csv"), newline="") as f:
        rows = list(csv.DictReader(f.read().splitlines()))
    if [r["controller"] for r in rows] != ["FSL", "FQL", "fixed(1)", "fixed(5)"]:
        fail(f"comparison rows out of order: {[r['controller'] for r in rows]}")
    for sub in ("FSL", "FQL", "fixed_1", "fixed_5"):
        s, _ = check_run(os.path.join(cmp_dir, sub))
        row = next(r for r in rows if r["controller"] == s["controller"])
        if not close(float(row["mean_vm_pct"]), s["mean_vm_pct"]):
            fail(f"comparison.csv disagrees with {sub}/summary.json")
    print("compare: 4 rows, each summary recomputed")
    print("PASS")


if __name__ == "__main__":
    main()
