"""BLI, cross-lingual word similarity and sentence retrieval evaluation"""
