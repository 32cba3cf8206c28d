import tensorflow as tf


def make_generator():
    return tf.keras.Sequential()


def make_discriminator():
    return tf.keras.Sequential()


for epoch in range(10):
    generator = make_generator()
    discriminator = make_discriminator()  # expect[TK-13]
    generator.compile(loss="mse")
    discriminator.compile(loss="mse")
    del generator
    del discriminator
tf.keras.backend.clear_session()
