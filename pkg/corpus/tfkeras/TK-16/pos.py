from keras.wrappers.scikit_learn import KerasClassifier
from sklearn.model_selection import GridSearchCV


def make_model():
    return None


classifier = KerasClassifier(build_fn=make_model)
grid = {"epochs": [5, 10]}
search = GridSearchCV(classifier, grid, n_jobs=-1)  # expect[TK-16]
