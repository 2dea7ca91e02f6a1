'''
Numerical construction and verification of Lagrangian H-umbilical submanifolds
of quaternion Euclidean space H^n.
'''

__version__ = "0.0.1"
__status__ = "Development"
