"""Typological diversity, train-test similarity and constraint-budget analyses"""
