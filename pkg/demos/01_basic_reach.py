# coding: utf-8

# # Bounding the outputs of a small network
#
# A two-layer tanh network with one input. The two hidden units see x and -x,
# so the output is tanh(tanh(x) + tanh(-x)), which is zero everywhere.
# Layer-by-layer interval propagation cannot see the cancellation. The mixed
# monotonicity bound uses the Jacobian of the whole network and does.

# In[1]:

import numpy as np

from mmreach import IntervalVector, Layer, Network, reach_ibp, reach_mm

net = Network([
    Layer([[1.0], [-1.0]], [0.0, 0.0], "tanh"),
    Layer([[1.0, 1.0]], [0.0], "tanh"),
])
box = IntervalVector([-0.5], [0.5])


# In[2]:

mm = reach_mm(net, box, keep_partial=True)
ibp = reach_ibp(net, box)
print("mm  output:", mm.output.lo, mm.output.hi, "width", mm.width)
print("ibp output:", ibp.output.lo, ibp.output.hi, "width", ibp.width)


# Every partial network NN(k, l) gets its own box, and each layer's box is
# the intersection over k.

# In[3]:

for (k, l), b in sorted(mm.per_pair.items()):
    print(f"layers {k}..{l}: [{b.lo[0]: .4f}, {b.hi[0]: .4f}]")


# Sampling confirms the box contains the true outputs.

# In[4]:

xs = np.linspace(box.lo[0], box.hi[0], 1001)[:, None]
ys = net.forward(xs)
print("sampled range:", ys.min(), ys.max(), "contained:", mm.output.contains(ys))
