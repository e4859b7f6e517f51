# generated-by: hornpoc 0.1.0 model=pkcs11_exp1 query=iknows(sens[])
import mocktoken

session = mocktoken.connect()

x1 = session.wrap(2, 1)
x2 = session.decrypt(2, x1); mocktoken.report(x2)

session.cleanup()
