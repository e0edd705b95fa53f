"""Quadratic forms, Witt rings, chain p-equivalence and Milnor / Witt /
Milnor-Witt K-groups of small exact fields."""

from .errors import MilnorWittError
from .fields import FieldDesc, FieldElem, Place, hilbert_symbol, square_class, valuation
from .quadform import GramMatrix, PfisterForm, QuadForm, decompose_value, is_isometric, is_isotropic, pfister
from .wittring import WittClass, witt_class
from .fpgroup import FPAbGroup, GroupHom, smith_normal_form
from .symbolic import (SymbolExpr, normal_form_zero, present_group, presentation_check_I_n,
                       verify_exact_sequence, verify_pullback, verify_theta)
from .chainp import ChainCertificate, PfisterTuple, find_chain, verify_chain
from .residues import residue, residue_milnor, residue_mw, residue_witt, support, unramified_check
from .parsing import parse_element, parse_field, parse_form, parse_place, parse_symbol

__version__ = "0.1.0"
