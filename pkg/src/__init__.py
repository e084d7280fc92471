"""ctc-detector: derivative-coupled detector responses near a time machine."""
