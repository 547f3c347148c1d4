"""PDDLS: PDDL with IRI context annotations, ontology-derived predicates and a STRIPS solver."""

__version__ = "0.1.0"
