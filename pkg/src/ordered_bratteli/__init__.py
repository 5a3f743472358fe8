"""Ordered Bratteli diagrams, their Vershik maps, and ordered premorphisms.

Diagrams are given by a finite preamble of levels followed by a cycle of
levels repeated forever; infinite paths are eventually periodic.
"""
from .construction import (ConstructionResult, DecisivenessClassification, FactoringReport,
                           OdometerConjugacy, TwoOdometers, UniqueMin, build_counterexample,
                           check_factoring, classify_decisiveness, rank2_reduce, unique_min_witness)
from .diagram import (Edge, EventuallyPeriodicPath, ExtremeSet, Kind, Level, OrderedBratteliDiagram,
                      ValidationReport, adjacency_matrix, all_prefixes, check_path, check_prefix,
                      count_extreme_paths, extreme_set_has_interior, is_infinite_space, is_simple,
                      telescope, telescope_periodic, unroll, validate_diagram)
from .dot import render_dot
from .dynamics import (NaturalExtension, is_eventually_extreme, is_extreme_path, orbit_segment,
                       resolve_extreme_tail, truncation_itinerary, vershik_predecessor,
                       vershik_predecessor_infinite, vershik_step, vershik_step_infinite)
from .errors import (BratteliError, DiagramMismatch, DomainMismatch, FiniteDiagramExhausted,
                     InvalidPath, InvalidPrefix, MaxPathNoExtension, NotExtreme, NotRank2,
                     ParseError, PatternMismatch, PrefixLengthMismatch, ValidationError)
from .fixtures import FIXTURES, Fixture, load_fixture
from .premorphism import (OrderedEdgeSet, Premorphism, compose_edge_sets, compose_premorphisms,
                          fiber_bound, identity_premorphism, induced_map_path, induced_map_prefix,
                          preimage_paths, preimage_prefixes, premorphisms_equivalent,
                          validate_premorphism)
from .sadic import (Cylinder, OneBlockCode, SadicMorphism, apply, check_commuting_rectangles,
                    compose_morphisms, extract_morphism, is_letter_surjective, one_block_code,
                    premorphism_to_eta, sliding_block_pipeline, tower_word)

__version__ = "0.1.0"
