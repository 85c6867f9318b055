# coding: utf-8

# # Comparing against interval bound propagation on random networks
#
# Small random networks: depth 1-5, widths 1-30, boxes of radius 0.1 around a
# random center. Widths are 2-norms of the output interval widths.

# In[1]:

import numpy as np

from mmreach.bench import RandomNetConfig, run_suite, summarize

for act in ["relu", "tanh", "elu", "silu"]:
    records = run_suite(RandomNetConfig.small(activation=act, count=300))
    s = summarize(records)
    p = s.get("mm", "ibp")
    print(f"{act:5s}  mm <= ibp: {p.tighter_or_equal:.3f}  mm < ibp: {p.strictly_tighter:.3f}  "
          f"time/neuron mm {s.mean_time_per_neuron['mm']:.1e}s ibp {s.mean_time_per_neuron['ibp']:.1e}s")


# Ratio of widths per instance, for one activation.

# In[2]:

records = run_suite(RandomNetConfig.small(activation="tanh", count=300))
w = {(r.network_id, r.method): r.width for r in records}
ratio = np.array([w[(i, "mm")] / w[(i, "ibp")] for i in range(300) if w[(i, "ibp")] > 0])
print("median mm/ibp width ratio:", np.median(ratio))
print("quartiles:", np.percentile(ratio, [25, 75]))
