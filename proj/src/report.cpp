namespace twk {}
