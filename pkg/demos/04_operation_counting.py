"""Measure the per-step cost of each regime in inner products.

Full mode updates everything against everything: cost grows with the
step index squared-ish. The limited regime pins the component count, so
cost grows linearly. The stochastic regime also pins the number of
sampled previous steps, so cost is flat after the sampling kicks in.
"""

from streampca import AdaptiveConfig, run_adaptive, synth

store, _ = synth("lowrank", d=100, n=200, params={"rank": 6, "sigma": 0.05}, seed=12)

regimes = {
    "full": AdaptiveConfig(space_limit=200, processing_limit=200),
    "limited (10)": AdaptiveConfig(space_limit=10, processing_limit=200),
    "stochastic (10, 25)": AdaptiveConfig(space_limit=10, processing_limit=25, seed=1),
}

logs = {}
for name, config in regimes.items():
    state = run_adaptive(store, config)
    logs[name] = dict(state.counter.per_step_log)
    print(f"{name:22s} total inner products: {state.counter.dot_products:>10,}")

print("\nper-step counts:")
print("step   " + "".join(f"{name:>22s}" for name in regimes))
for step in (10, 25, 50, 100, 150, 200):
    row = f"{step:4d}   "
    for name in regimes:
        row += f"{logs[name].get(step, 0):>22,}"
    print(row)

tail = [logs["stochastic (10, 25)"][s] for s in range(27, 201)]
print(f"\nstochastic regime steps 27..200: {'constant' if len(set(tail)) == 1 else 'varying'}"
      f" at {tail[0]} inner products per step")
