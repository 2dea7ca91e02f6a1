'''
Quaternion arithmetic and the ambient quaternion space H^n.

Quaternions are stored as float64 arrays whose last axis holds the (w, x, y, z)
components along (1, i, j, k). An HVector is an (n, 4) array: n quaternion
components making up a point or vector of R^{4n}. Every function here accepts
leading batch axes so whole stencils or grids are processed in one call.

The three almost-complex structures I, J, K act on H^n by LEFT multiplication
of every component by i, j, k. Left multiplications compose as L_i L_j = L_k,
which is the table IJ = -JI = K, JK = -KJ = I, KI = -IK = J.
'''

__version__ = "0.0.1"
__status__ = "Development"

import logging
from enum import Enum
from dataclasses import dataclass

import numpy as np

# Init the logger.
log = logging.getLogger(__name__)


class DimensionMismatchError(ValueError):
    '''
    Raised when HVectors of different quaternion dimension are combined, or when
    an operation needs a specific intrinsic / ambient dimension pairing.
    '''


class StructureTag(Enum):
    I = "I"
    J = "J"
    K = "K"

    @property
    def unit(self):
        '''
        The unit imaginary quaternion whose left multiplication realises this structure.
        '''
        return _UNITS[self.value]

    def __mul__(self, other):
        '''
        Composition of structures: returns (sign, tag) with self∘other = sign·tag.
        '''
        product = hamilton(self.unit, other.unit)
        for tag in STRUCTURES:
            for sign in (1, -1):
                if np.array_equal(product, sign * tag.unit):
                    return sign, tag
        raise ValueError(f'{self.name}{other.name} is not a structure (it is real)')


_UNITS = {
    "I": np.array([0.0, 1.0, 0.0, 0.0]),
    "J": np.array([0.0, 0.0, 1.0, 0.0]),
    "K": np.array([0.0, 0.0, 0.0, 1.0]),
}

STRUCTURES = (StructureTag.I, StructureTag.J, StructureTag.K)

ONE = np.array([1.0, 0.0, 0.0, 0.0])


####################################################
# Array level arithmetic

def hamilton(p, q):
    '''
    Vectorized Hamilton product p·q over the last axis (length 4). Leading axes
    broadcast as in numpy.

    ### Parameters:

        **p**, **q**: array_like (..., 4)
            Quaternions as (w, x, y, z).

    ### Returns:

        **product**: numpy.ndarray (..., 4)
    '''
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack([
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    ], axis=-1)


def conjugate(q):
    q = np.asarray(q, dtype=np.float64)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def quat_norm2(q):
    q = np.asarray(q, dtype=np.float64)
    return np.sum(q * q, axis=-1)


def quat_norm(q):
    return np.sqrt(quat_norm2(q))


def real_part(q):
    return np.asarray(q, dtype=np.float64)[..., 0]


####################################################
# Quaternion value type

@dataclass(frozen=True)
class Quaternion:
    '''
    One element of H. Thin immutable wrapper over the array representation for
    callers that work with single values.
    '''
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, values):
        w, x, y, z = (float(v) for v in np.asarray(values, dtype=np.float64).reshape(4))
        return cls(w, x, y, z)

    def as_array(self):
        return np.array([self.w, self.x, self.y, self.z], dtype=np.float64)

    def norm2(self):
        return float(quat_norm2(self.as_array()))

    def norm(self):
        return float(np.sqrt(self.norm2()))

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        return Quaternion.from_array(self.as_array() * float(other))

    __rmul__ = __mul__

    def __add__(self, other):
        return Quaternion.from_array(self.as_array() + other.as_array())

    def __sub__(self, other):
        return Quaternion.from_array(self.as_array() - other.as_array())

    def __neg__(self):
        return Quaternion.from_array(-self.as_array())

    def isclose(self, other, atol=1e-12):
        return bool(np.allclose(self.as_array(), other.as_array(), rtol=0.0, atol=atol))


def quat_mul(p, q):
    '''
    Hamilton product of two Quaternions. Associative, and norm(pq) = norm(p)·norm(q).
    '''
    return Quaternion.from_array(hamilton(p.as_array(), q.as_array()))


def quat_conj(q):
    '''
    Quaternionic conjugate: negates the i, j, k parts, so q·conj(q) = norm²(q).
    '''
    return Quaternion.from_array(conjugate(q.as_array()))


####################################################
# The ambient space H^n

def hvector(components):
    '''
    Builds an HVector, an (n, 4) float64 array, from a list of Quaternions, a list
    of 4-sequences, or an existing array.

    ### Parameters:

        **components**: list<Quaternion> | array_like (n, 4)

    ### Returns:

        **vector**: numpy.ndarray (n, 4)
    '''
    if len(components) and isinstance(components[0], Quaternion):
        data = np.stack([c.as_array() for c in components])
    else:
        data = np.array(components, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != 4 or data.shape[0] < 1:
        raise ValueError(f'An HVector needs shape (n, 4) with n >= 1, got {data.shape}')
    return data


def apply_structure(phi, v):
    '''
    Applies the almost-complex structure phi to v by left multiplying every
    quaternion component by phi's unit. A linear isometry with phi∘phi = -1.

    ### Parameters:

        **phi**: StructureTag

        **v**: numpy.ndarray (..., n, 4)

    ### Returns:

        **phi_v**: numpy.ndarray of the same shape as v
    '''
    return hamilton(phi.unit, v)


def inner(u, v):
    '''
    Euclidean inner product of R^{4n} written quaternionically: Re Σ_a u_a·conj(v_a),
    which equals the dot product of the flattened component arrays. Leading batch
    axes are kept; the last two axes (n, 4) are contracted.

    ### Parameters:

        **u**, **v**: numpy.ndarray (..., n, 4)
            Must share the quaternion dimension n.

    ### Returns:

        **value**: float or numpy.ndarray of the batch shape
    '''
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape[-2:] != v.shape[-2:]:
        raise DimensionMismatchError(
            f'Cannot take the inner product of HVectors with shapes {u.shape[-2:]} and {v.shape[-2:]}')
    value = np.sum(u * v, axis=(-2, -1))
    if np.ndim(value) == 0:
        return float(value)
    return value


def norm(v):
    return float(np.sqrt(inner(v, v)))
