# coding: utf-8

# # Plugging in a new activation
#
# The engine only needs Phi and Phi' as piecewise-monotone descriptors: the
# function plus its global argmin and argmax (infinite when the function is
# monotone). Softsign x / (1 + |x|) is increasing, and its derivative peaks at 0.

# In[1]:

import numpy as np

from mmreach import ActivationSpec, IntervalVector, Layer, Network, PiecewiseMonotoneDescriptor, register
from mmreach.activations import check_descriptor, unregister
from mmreach.errors import ShapeViolation
from mmreach.reach import reach_ibp, reach_mm

softsign = ActivationSpec(
    "softsign",
    PiecewiseMonotoneDescriptor(lambda x: x / (1 + np.abs(x))),
    PiecewiseMonotoneDescriptor(lambda x: 1 / (1 + np.abs(x)) ** 2, zmax=0.0),
    kinks=(0.0,),
)
register(softsign)  # checks shape and derivative numerically


# A wrong argmax is caught before it can produce unsound bounds.

# In[2]:

try:
    check_descriptor(PiecewiseMonotoneDescriptor(lambda x: 1 / (1 + np.abs(x)) ** 2, zmax=1.0))
except ShapeViolation as e:
    print("rejected:", e)


# In[3]:

rng = np.random.default_rng(0)
net = Network.from_weights(
    [rng.uniform(-1, 1, (6, 3)), rng.uniform(-1, 1, (6, 6)), rng.uniform(-1, 1, (2, 6))],
    [rng.uniform(-0.5, 0.5, 6), rng.uniform(-0.5, 0.5, 6), rng.uniform(-0.5, 0.5, 2)],
    "softsign",
)
box = IntervalVector.from_center(rng.uniform(-1, 1, 3), 0.1)
print("mm :", reach_mm(net, box).width)
print("ibp:", reach_ibp(net, box).width)


# On wide boxes the derivative bounds straddle zero in many entries, and the
# last layer alone (which matches interval propagation there) wins the
# intersection.

# In[4]:

wide = IntervalVector.from_center(box.mid, 0.3)
print("mm :", reach_mm(net, wide).width)
print("ibp:", reach_ibp(net, wide).width)

unregister("softsign")
