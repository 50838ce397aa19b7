import json
import math

import numpy as np
import pytest

from inrhomb import (Ball, ConvexBodySpec, Ellipsoid, Frame, Intersection,
                     Superellipsoid, body_to_json, random_frame)


def ball(dim, r=1.0, translation=None):
    return ConvexBodySpec(dim=dim, shape=Ball(r), translation=translation)


def ellipsoid(semi_axes, rotation=None, translation=None):
    return ConvexBodySpec(dim=len(semi_axes), shape=Ellipsoid(tuple(semi_axes)),
                          rotation=rotation, translation=translation)


def superellipsoid(q, semi_axes, rotation=None, translation=None):
    return ConvexBodySpec(dim=len(semi_axes),
                          shape=Superellipsoid(q, tuple(semi_axes)),
                          rotation=rotation, translation=translation)


def rotation_matrix(dim, seed):
    R = random_frame(dim, seed).axes
    if np.linalg.det(R) < 0:
        R = R.copy()
        R[0] = -R[0]
    return R


def rotation_2d(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotation_3d_plane(theta, i=0, j=1):
    R = np.eye(3)
    c, s = math.cos(theta), math.sin(theta)
    R[i, i] = c
    R[j, j] = c
    R[i, j] = -s
    R[j, i] = s
    return R


# Two-disc lens with one wedge corner at the origin whose tangent cone
# avoids all four half-axes (fibers along both axes touch only the corner).
# Unequal radii keep the second circle-intersection point benign.
def lens2d(a1=-5.0, a2=95.0, r1=1.0, r2=0.6):
    n1 = np.array([math.cos(math.radians(a1)), math.sin(math.radians(a1))])
    n2 = np.array([math.cos(math.radians(a2)), math.sin(math.radians(a2))])
    m1 = ConvexBodySpec(dim=2, shape=Ball(r1), translation=-r1 * n1)
    m2 = ConvexBodySpec(dim=2, shape=Ball(r2), translation=-r2 * n2)
    return ConvexBodySpec(dim=2, shape=Intersection((m1, m2)),
                          interior_point=[-0.35, -0.35])


# Two unit balls with centres in the xy-plane: the sphere-intersection edge
# is a vertical circle through the origin, and the fibers along both x and y
# touch the body only once along the whole edge while horizontal sections are
# two-dimensional: regularity with respect to the standard basis fails on
# the edge.
def lens3d_extruded(a1=-5.0, a2=95.0):
    n1 = np.array([math.cos(math.radians(a1)), math.sin(math.radians(a1)), 0.0])
    n2 = np.array([math.cos(math.radians(a2)), math.sin(math.radians(a2)), 0.0])
    m1 = ConvexBodySpec(dim=3, shape=Ball(1.0), translation=-n1)
    m2 = ConvexBodySpec(dim=3, shape=Ball(1.0), translation=-n2)
    return ConvexBodySpec(dim=3, shape=Intersection((m1, m2)),
                          interior_point=[-0.45, -0.45, 0.0])


# Two unit balls stacked along z: strictly convex with a horizontal edge
# circle; regular with respect to the standard basis (the double-silhouette
# points are exactly the two poles).
def lens3d_revolution():
    m1 = ConvexBodySpec(dim=3, shape=Ball(1.0), translation=[0.0, 0.0, 0.5])
    m2 = ConvexBodySpec(dim=3, shape=Ball(1.0), translation=[0.0, 0.0, -0.5])
    return ConvexBodySpec(dim=3, shape=Intersection((m1, m2)))


def write_body(tmp_path, body, name="body.json"):
    path = tmp_path / name
    path.write_text(json.dumps(body_to_json(body)))
    return str(path)


@pytest.fixture
def lens_body():
    return lens2d()


@pytest.fixture
def smooth_bodies_small():
    return [
        ball(2, 1.0),
        ball(3, 1.0),
        ellipsoid((1.0, 2.0)),
        ellipsoid((1.0, 2.0, 3.0)),
        superellipsoid(4.0, (1.0, 1.0, 1.0)),
    ]
