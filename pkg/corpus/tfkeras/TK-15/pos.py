import os

from tensorflow import keras

os.environ["CUDA_HOME"] = "/usr/local/cuda-10.0"
os.environ["LD_LIBRARY_PATH"] = "/usr/local/cuda-11.2/lib64"  # expect[TK-15]

model = keras.models.load_model("m.h5")
