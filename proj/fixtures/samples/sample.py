# greet twice
def greet(name):
    total = 2
    for i in range(total):
        print("hi", name, i + 1)
    return total * 2.5
