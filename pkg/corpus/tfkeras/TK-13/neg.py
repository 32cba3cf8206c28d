import tensorflow as tf


def make_generator():
    return tf.keras.Sequential()


def make_discriminator():
    return tf.keras.Sequential()


for epoch in range(10):
    generator = make_generator()
    generator.compile(loss="mse")
    tf.keras.backend.clear_session()
    discriminator = make_discriminator()
    discriminator.compile(loss="mse")
    tf.keras.backend.clear_session()
