"""biaslens: sentence-level bias screening for enterprise text.

A next-token LSTM language model is pretrained over an ordered sequence of
corpora (general, then domain), converted into a five-class sentence
classifier by freezing the vocabulary head and attaching a linear +
class-softmax head, evaluated with the standard six classification measures,
and served behind a concurrent HTTP gateway with a content-screener client.
"""

__version__ = "0.1.0"
