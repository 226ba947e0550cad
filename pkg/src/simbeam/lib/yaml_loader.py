from ruamel import yaml
import os


def safe_loader(stream, Loader=yaml.SafeLoader, master=None):
    loader = Loader(stream)

    if master is not None:
        loader.anchors = master.anchors
    try:
        data = loader.get_single_data()

        return data
    finally:
        loader.dispose()


class Loader(yaml.SafeLoader):

    def __init__(self, stream):

        self.__stream = stream
        self._root = os.path.split(getattr(stream, 'name', ''))[0]
        super(Loader, self).__init__(stream)

    def include(self, node):
        """
        Include a mapping from a sibling yaml file, e.g.
        `optimizer: !include optimizer.yml`
        """
        filename = os.path.join(self._root, self.construct_scalar(node))
        with open(filename, 'r') as f:
            return safe_loader(f, Loader=Loader, master=self)


Loader.add_constructor('!include', Loader.include)


def dump_yaml(data: dict, stream):
    """Write plain python data as block-style yaml"""
    dumper = yaml.YAML(typ='safe', pure=True)
    dumper.default_flow_style = False
    dumper.dump(data, stream)
