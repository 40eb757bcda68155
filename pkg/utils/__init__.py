"""Utilities package for the lexspec toolkit"""
