import tensorflow as tf

inputs = tf.keras.Input(shape=(784,))
x = tf.keras.layers.Reshape((28, 28))(inputs)
outputs = tf.keras.layers.Dense(10)(x)
model = tf.keras.Model(inputs, outputs)
