"""retouch: a parametric photo retouching engine, a model-driven
retouching agent with an iterative reflection loop, and the session
service and CLI around them."""

__version__ = "0.1.0"
