"""Rely/guarantee verification engine: language, semantics, satisfaction checks and proof trees."""
