"""Manufactured-solution convergence study on the unit square.

For velocity degree N+1 / pressure degree N the expected L2 orders are
N+2 for velocity and N+1 for pressure.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from nozzlebench.mms import convergence_study, observed_orders

hs = [0.2, 0.1, 0.05]

fig, ax = plt.subplots(figsize=(5, 4))
for order, marker in ((1, "o"), (2, "s")):
    eu, ep = convergence_study(hs, order=order)
    pu = observed_orders(hs, eu)
    pp = observed_orders(hs, ep)
    print(f"N = {order}: velocity order {pu:.2f}, pressure order {pp:.2f}")
    ax.loglog(hs, eu, marker + "-", label=f"velocity N={order} ({pu:.2f})")
    ax.loglog(hs, ep, marker + "--", label=f"pressure N={order} ({pp:.2f})")

# reference slopes
h = np.array(hs)
ax.loglog(h, 0.5 * (h / h[0]) ** 3 * 1e-2, "k:", label="slope 3")
ax.set_xlabel("h")
ax.set_ylabel("relative L2 error")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("mms_convergence.png", dpi=150)
print("wrote mms_convergence.png")
