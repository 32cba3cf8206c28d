import tensorflow as tf


def augment_batch(images):
    out = []
    for img in images:
        out.append(tf.image.flip_left_right(img))
    result = list(out)
    out.clear()
    return result
