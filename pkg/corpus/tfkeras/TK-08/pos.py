import tensorflow as tf


def augment_batch(images):
    out = []
    for img in images:
        out.append(tf.image.flip_left_right(img))  # expect[TK-08]
    return out
