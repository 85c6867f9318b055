# coding: utf-8

# # Why every partial network is used
#
# A network can be cut into consecutive segments, each bounded on its own and
# chained through the intermediate boxes. Using all partial networks and
# intersecting gives a box no larger than any such chain.

# In[1]:

import numpy as np

from mmreach.network import RandomNetConfig, random_input_box, random_network
from mmreach.reach import decompositions, reach_mm, reach_segments

net = random_network(RandomNetConfig(depth=(4, 4), hidden=(8, 8), activation="tanh"), 3)
box = random_input_box(net, 3, eps=0.3)
best = reach_mm(net, box).width
for segs in decompositions(net.depth):
    w = float(np.linalg.norm(reach_segments(net, box, segs).width))
    print(f"{str(segs):40s} width {w:.4f}")
print(f"{'all partial networks':40s} width {best:.4f}")


# ## Derivative boxes
#
# The Jacobian of NN(k, l) must hold on the whole input box of that partial
# network. Evaluating layer l's derivative bounds on the intersected layer box
# is cheaper, but that box was tightened using other partial networks. Points
# reachable from the input box of NN(k, l) can then fall outside it, and the
# Jacobian no longer covers them. On this ReLU instance the intersection even
# comes out empty.

# In[2]:

from mmreach.errors import EmptyIntersection

net = random_network(RandomNetConfig.small(activation="relu"), 64)
box = random_input_box(net, 64)
try:
    reach_mm(net, box, derivative_boxes="layer")
except EmptyIntersection as e:
    print("layer boxes:", e)
print("pair boxes: ", reach_mm(net, box).output)
