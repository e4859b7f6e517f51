# generated-by: hornpoc 0.1.0 model=pkcs11_exp2 query=iknows(sens[])
import mocktoken

session = mocktoken.connect()

x1 = session.generate_key(mocktoken.attrs(False, False, True, False, False, True))
x2 = session.wrap(x1, 1)
x3 = session.decrypt(x1, x2); mocktoken.report(x3)

session.cleanup()
