"""Subword tokenizer and the small trainable bi-encoder"""
