import json
import re
import sys

import jsonschema

schema = json.load(open(sys.argv[1]))
for path in sys.argv[2:]:
    text = re.sub(r"^\s*//.*$", "", open(path).read(), flags=re.M)
    jsonschema.validate(json.loads(text), schema)
    print("valid", path)
