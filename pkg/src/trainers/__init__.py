"""Package initialization"""
