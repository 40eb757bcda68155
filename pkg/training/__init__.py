"""Language-pair sampling, contrastive objective, AdamW and the training loop"""
