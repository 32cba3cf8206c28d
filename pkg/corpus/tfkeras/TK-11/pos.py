import tensorflow as tf

model = tf.keras.models.load_model("weights.h5")
inputs = tf.zeros((1, 4))
preds = model.predict(inputs)
del model  # expect[TK-11]
