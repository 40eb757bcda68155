"""Synset and constraint domain model plus the constraint-mining pipeline"""
