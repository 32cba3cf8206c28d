import tensorflow as tf

inputs = tf.keras.Input(shape=(784,))
x = tf.reshape(inputs, (-1, 28, 28))  # expect[TK-02]
outputs = tf.keras.layers.Dense(10)(x)
model = tf.keras.Model(inputs, outputs)
